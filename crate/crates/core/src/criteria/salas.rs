//! Salas-type statistics and finite-horizon verdicts.

use rayon::prelude::*;

use crate::lattice::{Idx, LogMag, WeightSequence};

/// max{ max_{|j|<=k} β(j-n, j), (min_{|j|<=k} β(j, j+n))^{-1} }.
pub fn salas_hyper_stat(w: &WeightSequence, k: u32, n: Idx) -> LogMag {
    let (a, b) = two_sided(w, k, n);
    a.max(b.inv())
}

/// (max_{|j|<=k} β(j-n, j)) · (min_{|j|<=k} β(j, j+n))^{-1}.
pub fn salas_super_stat(w: &WeightSequence, k: u32, n: Idx) -> LogMag {
    let (a, b) = two_sided(w, k, n);
    a - b
}

fn two_sided(w: &WeightSequence, k: u32, n: Idx) -> (LogMag, LogMag) {
    assert!(n >= 1, "statistics need n >= 1");
    let k = k as Idx;
    let mut a = LogMag(f64::NEG_INFINITY);
    let mut b = LogMag(f64::INFINITY);
    for j in -k..=k {
        a = a.max(w.beta_or_unit(j - n, j));
        b = b.min(w.beta_or_unit(j, j + n));
    }
    (a, b)
}

/// The one-index forms: (max{β(k-n+1,k), β(k+1,k+n)^{-1}}, β(k-n+1,k)·β(k+1,k+n)^{-1}).
pub fn salas_simplified_stats(w: &WeightSequence, k: Idx, n: Idx) -> (LogMag, LogMag) {
    assert!(n >= 1, "statistics need n >= 1");
    let left = w.beta_or_unit(k - n + 1, k);
    let right = w.beta_or_unit(k + 1, k + n);
    (left.max(right.inv()), left - right)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistic {
    Hyper,
    Super,
    SimplifiedHyper,
    SimplifiedSuper,
}

impl Statistic {
    pub fn parse(s: &str) -> Option<Statistic> {
        match s {
            "hyper" => Some(Statistic::Hyper),
            "super" => Some(Statistic::Super),
            "simplified-hyper" => Some(Statistic::SimplifiedHyper),
            "simplified-super" => Some(Statistic::SimplifiedSuper),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Hyper => "hyper",
            Statistic::Super => "super",
            Statistic::SimplifiedHyper => "simplified-hyper",
            Statistic::SimplifiedSuper => "simplified-super",
        }
    }

    pub fn eval(self, w: &WeightSequence, k: u32, n: Idx) -> LogMag {
        match self {
            Statistic::Hyper => salas_hyper_stat(w, k, n),
            Statistic::Super => salas_super_stat(w, k, n),
            Statistic::SimplifiedHyper => salas_simplified_stats(w, k as Idx, n).0,
            Statistic::SimplifiedSuper => salas_simplified_stats(w, k as Idx, n).1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConsistentAtHorizon,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::ConsistentAtHorizon => "consistent_at_horizon",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// A lower bound on the statistic that holds for every n, with the reason it holds.
#[derive(Clone, Debug)]
pub struct Floor {
    pub k: u32,
    pub value: LogMag,
    pub reason: &'static str,
}

#[derive(Clone, Debug)]
pub struct KSeries {
    pub k: u32,
    /// Entry i is the statistic at n = i + 1.
    pub series: Vec<LogMag>,
    pub running_min: LogMag,
    pub argmin: Idx,
}

#[derive(Clone, Debug)]
pub struct CriterionVerdict {
    pub statistic: Statistic,
    pub per_k: Vec<KSeries>,
    pub horizon: Idx,
    pub k_max: u32,
    pub tol: LogMag,
    pub floor: Option<Floor>,
    pub verdict: Verdict,
}

impl CriterionVerdict {
    pub fn running_min(&self) -> LogMag {
        self.per_k.iter().map(|s| s.running_min).fold(LogMag(f64::INFINITY), LogMag::min)
    }
}

/// Default tolerance 2^-20.
pub const DEFAULT_TOL: LogMag = LogMag(-20.0);

/// Lower bounds on the statistic that follow from declared properties of w.
pub fn proven_floor(w: &WeightSequence, stat: Statistic) -> Option<Floor> {
    let unit_side = w.lower_bound().0 >= 0.0 || w.upper_bound().0 <= 0.0;
    match stat {
        Statistic::Hyper => {
            if w.is_symmetric() {
                // β(-n,0) = β(0,n) by symmetry, so max{A, 1/B} >= max{β(0,n), 1/β(0,n)} >= 1
                Some(Floor { k: 0, value: LogMag::UNIT, reason: "symmetric weights: beta(-n,0) = beta(0,n)" })
            } else if unit_side {
                Some(Floor { k: 0, value: LogMag::UNIT, reason: "all weights on one side of 1" })
            } else {
                None
            }
        }
        Statistic::Super => w.is_symmetric().then_some(Floor {
            k: 0,
            value: LogMag::UNIT,
            reason: "symmetric weights: beta(-n,0) / beta(0,n) = 1",
        }),
        Statistic::SimplifiedHyper => {
            if unit_side {
                Some(Floor { k: 0, value: LogMag::UNIT, reason: "all weights on one side of 1" })
            } else if w.is_symmetric() {
                // β(1-n,0)/β(1,n) = w_0/w_n, so the max is at least sqrt(w_0 / upper)
                let v = (w.eval(0) - w.upper_bound()) * 0.5;
                Some(Floor { k: 0, value: v, reason: "symmetric weights: ratio at k = 0 is w_0/w_n" })
            } else {
                None
            }
        }
        Statistic::SimplifiedSuper => w.is_symmetric().then(|| Floor {
            k: 0,
            value: w.eval(0) - w.upper_bound(),
            reason: "symmetric weights: statistic at k = 0 is w_0/w_n",
        }),
    }
}

/// Evaluates the statistic for k <= k_max and 1 <= n <= horizon and derives a verdict.
pub fn evaluate_criterion(
    w: &WeightSequence,
    stat: Statistic,
    k_max: u32,
    horizon: Idx,
    tol: LogMag,
) -> CriterionVerdict {
    assert!(horizon >= 1, "horizon must be at least 1");
    let per_k: Vec<KSeries> = (0..=k_max)
        .map(|k| {
            let series: Vec<LogMag> = (1..=horizon).into_par_iter().map(|n| stat.eval(w, k, n)).collect();
            let (mut running_min, mut argmin) = (series[0], 1);
            for (i, v) in series.iter().enumerate() {
                if *v < running_min {
                    running_min = *v;
                    argmin = i as Idx + 1;
                }
            }
            KSeries { k, series, running_min, argmin }
        })
        .collect();
    let floor = proven_floor(w, stat).filter(|f| f.k <= k_max && f.value.0 > f64::NEG_INFINITY);
    let verdict = if let Some(f) = floor.as_ref().filter(|f| f.value > tol) {
        // the floor is a theorem about every n; a series below it means a bug
        let observed = per_k[f.k as usize].running_min;
        assert!(observed.0 >= f.value.0 - 1e-9, "statistic {observed} fell below its proven floor {}", f.value);
        Verdict::Violated
    } else if per_k.iter().all(|s| s.running_min < tol) {
        Verdict::ConsistentAtHorizon
    } else {
        Verdict::Inconclusive
    };
    CriterionVerdict { statistic: stat, per_k, horizon, k_max, tol, floor, verdict }
}

/// d_m = max{1, sup|w|}^{-2m} · min_{-m<=a<=b<=m} β(a,b).
pub fn d_constant(w: &WeightSequence, m: Idx) -> LogMag {
    // smallest interval sum of log weights on [-m, m]
    let mut best = f64::INFINITY;
    let mut run = 0f64;
    for j in -m..=m {
        let v = w.eval(j).0;
        run = if run < 0.0 { run + v } else { v };
        best = best.min(run);
    }
    LogMag(-2.0 * m as f64 * w.upper_bound().0.max(0.0) + best)
}
