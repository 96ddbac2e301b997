//! Whether zero lies in the weak closure of {c_α e_α}: divergence of Σ |c_α|^{-q}.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::series::{PartialSums, Trend};
use crate::error::{Error, Result};

/// A tail Σ_{n>=N} |c_n|^{-q}: bounded above, or known to diverge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    Bounded(f64),
    Divergent,
}

pub type TailFn = Arc<dyn Fn(u64, f64) -> Tail + Send + Sync>;

/// A coefficient sequence c_n, n >= 0, optionally with a closed-form tail for Σ |c_n|^{-q}.
#[derive(Clone)]
pub struct CoefSeq {
    pub f: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    pub tail: Option<TailFn>,
    pub label: String,
}

impl fmt::Debug for CoefSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefSeq({})", self.label)
    }
}

impl CoefSeq {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> CoefSeq {
        CoefSeq { f: Arc::new(f), tail: None, label: label.into() }
    }

    /// c_n = (n+1)^s. The terms (n+1)^{-sq} are decreasing, so the integral test bounds the tail.
    pub fn power(s: f64) -> CoefSeq {
        CoefSeq {
            f: Arc::new(move |n| ((n + 1) as f64).powf(s)),
            tail: Some(Arc::new(move |n_from, q| {
                let e = s * q;
                if e <= 1.0 {
                    Tail::Divergent
                } else {
                    // Σ_{n>=N} (n+1)^{-e} <= ∫_{N-1}^∞ (x+1)^{-e} dx = N^{1-e}/(e-1)
                    Tail::Bounded((n_from.max(1) as f64).powf(1.0 - e) / (e - 1.0))
                }
            })),
            label: format!("(n+1)^{s}"),
        }
    }

    pub fn with_tail(mut self, tail: TailFn) -> CoefSeq {
        self.tail = Some(tail);
        self
    }
}

/// Exponent of the series: finite q >= 1 (q = 1 for c₀), or the limit q → ∞, which counts |c_α| <= 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct DivergenceVerdict {
    pub q: Exponent,
    pub sums: PartialSums,
    pub trend: Trend,
    /// True when a closed-form tail decided the trend.
    pub certified: bool,
    /// Bracket [S(h), S(h) + tail] for the full sum when the tail is bounded.
    pub limit_bracket: Option<(f64, f64)>,
    /// Some c_α was zero: zero itself is in the set.
    pub zero_coefficient: bool,
}

impl DivergenceVerdict {
    /// Zero is in the weak closure (at horizon, or certified).
    pub fn zero_in_closure(&self) -> bool {
        self.zero_coefficient || self.trend == Trend::DivergingAtHorizon
    }
}

/// Partial sums of |c_n|^{-q}, n < horizon, and the resulting trend.
pub fn weak_zero_divergence(c: &CoefSeq, q: Exponent, horizon: u64) -> Result<DivergenceVerdict> {
    if let Exponent::Finite(q) = q {
        // q = 1 is the c₀ case (conjugate of p = ∞)
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("exponent must be at least 1, got {q}")));
        }
    }
    if horizon == 0 {
        return Err(Error::Domain("horizon must be positive".into()));
    }
    let vals: Vec<f64> = (0..horizon).into_par_iter().map(|n| (c.f)(n).abs()).collect();
    if vals.iter().any(|v| *v == 0.0) {
        return Ok(DivergenceVerdict {
            q,
            sums: PartialSums::default(),
            trend: Trend::DivergingAtHorizon,
            certified: true,
            limit_bracket: None,
            zero_coefficient: true,
        });
    }
    let terms: Vec<f64> = match q {
        Exponent::Finite(q) => vals.iter().map(|v| v.powf(-q)).collect(),
        Exponent::Infinity => vals.iter().map(|v| if *v <= 1.0 { 1.0 } else { 0.0 }).collect(),
    };
    let sums = PartialSums::from_terms(&terms);
    let mut trend = sums.trend();
    let mut certified = false;
    let mut limit_bracket = None;
    if let (Some(tail), Exponent::Finite(qf)) = (&c.tail, q) {
        certified = true;
        match tail(horizon, qf) {
            Tail::Bounded(t) => {
                trend = Trend::ConvergingAtHorizon;
                limit_bracket = Some((sums.total, sums.total + t));
            }
            Tail::Divergent => trend = Trend::DivergingAtHorizon,
        }
    }
    Ok(DivergenceVerdict { q, sums, trend, certified, limit_bracket, zero_coefficient: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_diverges() {
        let v = weak_zero_divergence(&CoefSeq::from_fn("1", |_| 1.0), Exponent::Finite(2.0), 1000).unwrap();
        assert_eq!(v.trend, Trend::DivergingAtHorizon);
        assert_eq!(v.sums.total, 1000.0);
    }

    #[test]
    fn inverse_squares_bracket_basel() {
        let v = weak_zero_divergence(&CoefSeq::power(1.0), Exponent::Finite(2.0), 100_000).unwrap();
        assert_eq!(v.trend, Trend::ConvergingAtHorizon);
        let (lo, hi) = v.limit_bracket.unwrap();
        let basel = std::f64::consts::PI.powi(2) / 6.0;
        assert!(lo <= basel && basel <= hi);
        assert!((lo - basel).abs() < 1e-3);
    }

    #[test]
    fn zero_coefficient_short_circuits() {
        let v = weak_zero_divergence(&CoefSeq::from_fn("z", |n| if n == 3 { 0.0 } else { 5.0 }), Exponent::Finite(2.0), 10)
            .unwrap();
        assert!(v.zero_coefficient && v.zero_in_closure());
    }
}
