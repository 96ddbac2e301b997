//! The full pipeline for a Rajchman measure with a weakly supercyclic multiplication operator:
//! a dense family h_i, the pairing φ, f_n = 2^{-φ₁(n)} φ₂(n)^{-1/2} h_{φ₁(n)}, the staged
//! construction with δ_n = 2^{-n}, then the Gram and divergence evidence for the orbit of 1.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::construct::{construct_stages, ConstructOptions, Construction};
use super::circle::uniform_partition;
use super::trig::TrigPoly;
use super::weakconv::{weak_convergence_check, WeakConvReport};
use crate::closure::pseq::{gram_2seq_bound, orbit_certificate, GramStats, OrbitCertificate, PSeqEvidence, SampleEvidence};
use crate::closure::series::{PartialSums, Trend};
use crate::error::{Error, Result};

/// Σ_{n>=2} (n−1)4^{-n}.
pub const GRAM_LIMIT: f64 = 1.0 / 9.0;

/// Grid size for the sampled sup-norm bound of the enumerated h_i.
const SUP_SAMPLES: usize = 4096;

#[derive(Clone, Debug)]
pub struct DriverOptions {
    pub h_count: usize,
    pub stages: usize,
    /// δ_1..δ_N; empty means δ_n = 2^{-n}.
    pub delta: Vec<f64>,
    /// Horizon for the per-family divergence sums.
    pub family_horizon: u64,
    pub construct: ConstructOptions,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions { h_count: 4, stages: 6, delta: Vec::new(), family_horizon: 100_000, construct: ConstructOptions::default() }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// h_1 = 1, h_2 = z, h_3 = z̄, h_4 = (1+z)/2 (each with sup norm exactly 1), then trigonometric
/// polynomials of degree <= 1 with Gaussian-integer coefficients by height, scaled by a sampled
/// upper bound on their sup norm.
pub fn dense_family(count: usize) -> Vec<TrigPoly> {
    let one = BigInt::one();
    let mut out = vec![
        TrigPoly::constant(c(1.0, 0.0)),
        TrigPoly::monomial(one.clone(), c(1.0, 0.0)),
        TrigPoly::monomial(-one.clone(), c(1.0, 0.0)),
        TrigPoly::from_terms([(BigInt::zero(), c(0.5, 0.0)), (one.clone(), c(0.5, 0.0))]),
    ];
    let seeded: BTreeSet<[i64; 6]> = [[0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 0], [1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 1, 0]].into_iter().collect();
    let mut height = 1i64;
    while out.len() < count {
        let range: Vec<i64> = (-height..=height).collect();
        let mut batch = Vec::new();
        // coefficient order: z^{-1}, z^0, z^1, each as (re, im)
        let mut idx = [0usize; 6];
        loop {
            let v: [i64; 6] = std::array::from_fn(|i| range[idx[i]]);
            let top = v.iter().map(|x| x.abs()).max().unwrap();
            let g = v.iter().fold(0i64, |acc, x| acc.gcd(x));
            if top == height && g == 1 && !seeded.contains(&v) {
                batch.push(v);
            }
            let mut p = 5;
            loop {
                idx[p] += 1;
                if idx[p] < range.len() {
                    break;
                }
                idx[p] = 0;
                if p == 0 {
                    break;
                }
                p -= 1;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
        for v in batch {
            if out.len() >= count {
                break;
            }
            let p = TrigPoly::from_terms([
                (-one.clone(), c(v[0] as f64, v[1] as f64)),
                (BigInt::zero(), c(v[2] as f64, v[3] as f64)),
                (one.clone(), c(v[4] as f64, v[5] as f64)),
            ]);
            let s = p.sampled_sup_bound(SUP_SAMPLES);
            let q = p.scale(c(1.0 / s, 0.0));
            let bound = q.sup_bound().min(1.0);
            out.push(q.with_sup_bound(bound));
        }
        height += 1;
    }
    out.truncate(count);
    out
}

/// The first `count` pairs (i, j) with i <= h_count, ordered by 4^i·j and then by i.
pub fn pairing(h_count: usize, count: usize) -> Result<Vec<(usize, usize)>> {
    if h_count == 0 {
        return Err(Error::Domain("h_count must be at least 1".into()));
    }
    let mut all: Vec<(u128, usize, usize)> = Vec::new();
    for i in 1..=h_count.min(60) {
        for j in 1..=count {
            all.push(((1u128 << (2 * i)) * j as u128, i, j));
        }
    }
    all.sort();
    Ok(all.into_iter().take(count).map(|(_, i, j)| (i, j)).collect())
}

/// f_n = 2^{-i} j^{-1/2} h_i for (i, j) = φ(n).
pub fn f_sequence(h: &[TrigPoly], phi: &[(usize, usize)]) -> Vec<TrigPoly> {
    phi.iter().map(|&(i, j)| h[i - 1].scale(c(0.5f64.powi(i as i32) / (j as f64).sqrt(), 0.0))).collect()
}

#[derive(Clone, Debug)]
pub struct DecaySnapshot {
    pub stage: usize,
    pub j: BigInt,
    /// max |μ̂^N(l)| over sampled j_n <= |l| <= 2 j_n, and where it was attained.
    pub max_abs: f64,
    pub at: BigInt,
    /// |μ̂^N(k_n)|.
    pub spike: f64,
}

#[derive(Clone, Debug)]
pub struct FamilyDivergence {
    pub family: usize,
    /// Partial sums of 2^{-2i} Σ 1/j.
    pub sums: PartialSums,
    pub trend: Trend,
}

#[derive(Clone, Debug)]
pub struct RajchmanReport {
    pub construction: Construction,
    pub h: Vec<TrigPoly>,
    pub phi: Vec<(usize, usize)>,
    pub gram: GramStats,
    /// Σ_{n=2}^{N} (n−1)4^{-n}.
    pub gram_target: f64,
    pub gram_pass: bool,
    pub families: Vec<FamilyDivergence>,
    pub orbit: OrbitCertificate,
    pub decay: Vec<DecaySnapshot>,
    /// |[μⁿ − μᴺ, h_i]| for the stage prefixes, on the whole circle and on 16 equal arcs.
    pub weak: WeakConvReport,
}

impl RajchmanReport {
    pub fn passed(&self) -> bool {
        self.construction.passed() && self.gram_pass && self.orbit.weakly_supercyclic
    }
}

pub fn rajchman_driver(opts: &DriverOptions) -> Result<RajchmanReport> {
    let n = opts.stages;
    if n == 0 {
        return Err(Error::Domain("at least one stage".into()));
    }
    let h = dense_family(opts.h_count);
    let phi = pairing(opts.h_count, n + 1)?;
    let f = f_sequence(&h, &phi);
    let delta: Vec<f64> = if opts.delta.is_empty() { (1..=n).map(|k| 0.5f64.powi(k as i32)).collect() } else { opts.delta.clone() };
    let construction = construct_stages(&f, &delta, n, &opts.construct)?;
    let mu = &construction.measure;
    let g = &construction.g;

    let products: Vec<(usize, usize, Complex64)> = (0..n)
        .flat_map(|a| (0..=a).map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(a, b)| (a, b, mu.pair(&(&g[a] * &g[b].conj()))))
        .collect();
    let mut inner = vec![vec![Complex64::zero(); n]; n];
    for (a, b, v) in products {
        inner[a][b] = v;
        inner[b][a] = v.conj();
    }
    let norms: Vec<f64> = (0..n).map(|a| inner[a][a].re.max(0.0).sqrt()).collect();
    let mut gram = gram_2seq_bound(&norms, |a, b| inner[a][b]);
    // a handful of rows says nothing about a trend; the certificate is Σ|⟨g_n,g_m⟩|² <= 1/9
    let gram_target: f64 = (2..=n).map(|k| (k as f64 - 1.0) * 0.25f64.powi(k as i32)).sum();
    let gram_pass = gram.c <= GRAM_LIMIT + 1e-6;
    gram.certified = gram_pass;
    gram.bound = (gram.d * gram.d + (2.0 * GRAM_LIMIT).sqrt()).sqrt();

    let horizon = opts.family_horizon.max(10);
    let mut families = Vec::new();
    let mut samples = Vec::new();
    for i in 1..=opts.h_count {
        let scale = 0.5f64.powi(i as i32);
        let alpha: Vec<f64> = (1..=horizon).map(|j| scale / (j as f64).sqrt()).collect();
        let sq: Vec<f64> = alpha.iter().map(|a| a * a).collect();
        let sums = PartialSums::from_terms(&sq);
        families.push(FamilyDivergence { family: i, trend: sums.trend(), sums });
        samples.push(SampleEvidence { label: format!("h_{i}"), c1: PSeqEvidence::Gram(gram.clone()), alpha, q: 2.0, alpha_is_beta: false });
    }
    let orbit = orbit_certificate(&samples, false)?;

    let ks = construction.ks();
    let mut decay = Vec::new();
    for s in &construction.states {
        let ls = snapshot_freqs(&s.j, &ks);
        let vals: Vec<(f64, BigInt)> = ls.par_iter().map(|l| (mu.fourier(l).norm(), l.clone())).collect();
        let (max_abs, at) = vals.into_iter().fold((0.0, s.j.clone()), |acc, v| if v.0 > acc.0 { v } else { acc });
        let spike = mu.fourier(&s.k).norm();
        decay.push(DecaySnapshot { stage: s.stage, j: s.j.clone(), max_abs, at, spike });
    }
    let prefixes: Vec<_> = (1..=construction.measure.levels()).map(|l| construction.measure.prefix(l)).collect();
    let weak = weak_convergence_check(&prefixes, &h, &uniform_partition(16)?, 1e-12);
    Ok(RajchmanReport { construction, h, phi, gram, gram_target, gram_pass, families, orbit, decay, weak })
}

/// Sampled frequencies in [j, 2j]: an even grid plus the combinations ±k_a ± k_b and 2k_a, where
/// the spectrum of the layered measure concentrates.
fn snapshot_freqs(j: &BigInt, ks: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = (0..16u32).map(|i| j + (j * i) / 15u32).collect();
    out.push(j + 1u32);
    let hi: BigInt = j * 2u32;
    let ks: Vec<&BigInt> = ks.iter().filter(|k| !k.is_zero()).collect();
    for (a, ka) in ks.iter().enumerate() {
        out.push((*ka).clone());
        out.push(*ka * 2u32);
        for kb in &ks[..a] {
            out.push(*ka + *kb);
            out.push(*ka - *kb);
        }
    }
    out.retain(|l| l >= j && *l <= hi);
    out.sort();
    out.dedup();
    out
}
