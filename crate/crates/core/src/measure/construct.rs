//! The inductive construction: probability densities μ^1, μ^2, ... with frequencies k_n, Fourier
//! cutoffs j_n and partitions m_n, each stage checked against conditions P1 to P9.
//!
//! The rotation step is phase-aligned: the constants b^{n-1} are quantized to a common phase grid and
//! μ^n multiplies μ^{n-1} by a balanced two-valued pattern in frac(k_n t), so arc masses (P4) and
//! the restricted coefficients at k_n (P5) hold by construction and every other check has an
//! analytic bound plus a closed-form numeric confirmation.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::circle::{CircleArc, MASS_TOL};
use super::layered::{Layer, LayeredMeasure, Pattern, Run};
use super::phase::to_f64;
use super::trig::TrigPoly;
use crate::error::{Error, Result};

/// sup over θ and window position of |∫_0^1 (v(s) − 1)/x · e^{2πiθs} ds|, rounded up.
/// The sup is 2 sin²(πθ/2)/(π|θ|) at θ ≈ 0.74 with an unwrapped window.
pub const PATTERN_GAIN: f64 = 0.7247;

#[derive(Clone, Debug)]
pub struct ConstructOptions {
    pub max_k_bits: u64,
    pub max_blocks: u64,
    /// Arcs sampled per partition for P3, P4 and P5.
    pub sample_arcs: usize,
    /// Frequencies sampled per range for P6, P7 and P8.
    pub sample_freqs: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { max_k_bits: 512, max_blocks: 1 << 22, sample_arcs: 24, sample_freqs: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    /// Integer or structural fact; value 0 means it holds.
    Exact,
    /// Analytic upper bound.
    Bound,
    /// Closed-form value over the whole required set.
    Computed,
    /// Closed-form value over a deterministic sample.
    Sampled,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Exact => "exact",
            CheckKind::Bound => "bound",
            CheckKind::Computed => "computed",
            CheckKind::Sampled => "sampled",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckEntry {
    pub stage: usize,
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub detail: String,
}

impl CheckEntry {
    fn leq(stage: usize, name: &str, kind: CheckKind, value: f64, bound: f64, detail: String) -> CheckEntry {
        CheckEntry { stage, name: name.into(), kind, value, bound, pass: value <= bound, detail }
    }

    fn lt(stage: usize, name: &str, kind: CheckKind, value: f64, bound: f64, detail: String) -> CheckEntry {
        CheckEntry { stage, name: name.into(), kind, value, bound, pass: value < bound, detail }
    }

    fn exact(stage: usize, name: &str, ok: bool, detail: String) -> CheckEntry {
        CheckEntry { stage, name: name.into(), kind: CheckKind::Exact, value: if ok { 0.0 } else { 1.0 }, bound: 0.5, pass: ok, detail }
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.value
    }
}

/// b = mag_index·Δ·e^{2πi s/q} on each block of 1/B.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockConstants {
    pub delta: f64,
    pub q: u64,
    pub cells: Vec<(u64, u64)>,
}

impl BlockConstants {
    /// Quantizes f at the block midpoints: magnitude floored to a multiple of Δ, phase rounded to 1/q.
    pub fn quantize(f: &TrigPoly, blocks: u64, delta: f64, q: u64) -> BlockConstants {
        let den = BigInt::from(2 * blocks);
        let cells = (0..blocks)
            .into_par_iter()
            .map(|beta| {
                let z = f.eval_rational(&BigInt::from(2 * beta + 1), &den);
                // strictly below |f|, so max|b| < ‖f‖ even when |f| is a multiple of Δ
                let mi = ((z.norm() / delta) * (1.0 - 1e-9)).floor() as u64;
                if mi == 0 {
                    return (0, 0);
                }
                let s = ((z.arg() / (2.0 * PI)) * q as f64).round().rem_euclid(q as f64) as u64 % q;
                (mi, s)
            })
            .collect();
        BlockConstants { delta, q, cells }
    }

    pub fn magnitude(&self, block: usize) -> f64 {
        self.cells[block].0 as f64 * self.delta
    }

    pub fn value(&self, block: usize) -> Complex64 {
        let (mi, s) = self.cells[block];
        Complex64::from_polar(mi as f64 * self.delta, 2.0 * PI * s as f64 / self.q as f64)
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.cells.len()).map(|b| self.magnitude(b)).fold(0.0, f64::max)
    }

    /// Maximal runs of equal constants, with their aligned patterns.
    pub fn runs(&self) -> Result<Vec<Run>> {
        let mut out: Vec<Run> = Vec::new();
        let mut prev = None;
        for (beta, &cell) in self.cells.iter().enumerate() {
            if prev == Some(cell) {
                out.last_mut().unwrap().len += 1;
                continue;
            }
            let pattern = Pattern::aligned(cell.0 as f64 * self.delta, cell.1, self.q)?;
            out.push(Run { start: beta as u64, len: 1, pattern });
            prev = Some(cell);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub stage: usize,
    pub eps: f64,
    pub k: BigInt,
    pub j: BigInt,
    pub m: BigInt,
    /// b^n on each block, approximating f_{n+1}.
    pub b: BlockConstants,
    pub variation_bound: f64,
    pub joint_runs: usize,
    pub checks: Vec<CheckEntry>,
}

impl ConstructionState {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// c = g at the midpoint of the arc [j/m, (j+1)/m).
pub fn arc_constant(g: &TrigPoly, m: &BigInt, j: &BigInt) -> Complex64 {
    g.eval_rational(&(j * 2 + 1u32), &(m * 2))
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub states: Vec<ConstructionState>,
    pub measure: LayeredMeasure,
    pub f: Vec<TrigPoly>,
    pub g: Vec<TrigPoly>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
    pub final_checks: Vec<CheckEntry>,
}

impl Construction {
    pub fn ks(&self) -> Vec<BigInt> {
        self.states.iter().map(|s| s.k.clone()).collect()
    }

    pub fn checks(&self) -> impl Iterator<Item = &CheckEntry> {
        self.states.iter().flat_map(|s| s.checks.iter()).chain(self.final_checks.iter())
    }

    pub fn passed(&self) -> bool {
        self.checks().all(|c| c.pass)
    }
}

/// ε_n = δ_floor·2^{-n}/24 for n = 1..=count, with δ_floor = min δ_n 2^n, so that
/// Σ_{k>=n} ε_k = δ_floor 2^{-n}/12 < δ_n/6.
pub fn eps_schedule(delta: &[f64], count: usize) -> Result<Vec<f64>> {
    if delta.is_empty() || delta.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Domain("δ_n must be positive".into()));
    }
    let floor = delta.iter().enumerate().map(|(i, d)| d * 2f64.powi(i as i32 + 1)).fold(f64::INFINITY, f64::min);
    Ok((1..=count).map(|n| floor * 0.5f64.powi(n as i32) / 24.0).collect())
}

fn ceil_big(x: f64) -> Result<BigInt> {
    BigInt::from_f64(x.ceil()).ok_or_else(|| Error::Budget(format!("{x} is not a finite integer bound")))
}

/// A multiple of `base` at least `req`, and at least `base`.
fn multiple_at_least(base: &BigInt, req: f64) -> Result<BigInt> {
    let q = ceil_big(req * (1.0 + 1e-9) / to_f64(base))?;
    Ok(base * q.max(BigInt::one()))
}

/// Deterministic spread of arc indices in [0, m).
fn sample_indices(m: &BigInt, count: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(), m - 1u32, m / 2];
    let golden = 0.618_033_988_749_894_9_f64;
    for i in 1..=count {
        let frac = (i as f64 * golden).fract();
        let scaled = BigInt::from((frac * (1u64 << 53) as f64) as u64);
        out.push((m * scaled) >> 53u32);
    }
    out.sort();
    out.dedup();
    out
}

/// Deterministic frequencies in [lo, hi) on both signs.
fn sample_freqs(lo: &BigInt, hi: &BigInt, count: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    let span = hi - lo;
    for i in 0..count {
        let frac = ((i as f64 + 0.5) * 0.618_033_988_749_894_9).fract();
        let scaled = BigInt::from((frac * (1u64 << 53) as f64) as u64);
        out.push(lo + ((&span * scaled) >> 53u32));
    }
    out.push(lo.clone());
    out.push(hi - 1u32);
    let neg: Vec<BigInt> = out.iter().map(|l| -l).collect();
    out.extend(neg);
    out.sort();
    out.dedup();
    out
}

fn fourier_many(mu: &LayeredMeasure, ls: &[BigInt]) -> Vec<Complex64> {
    ls.iter().map(|l| mu.fourier(l)).collect()
}

/// Runs the construction for `stages` stages. `f` holds f_1..f_{stages+1} with declared sup-norm
/// bounds, `delta` holds δ_1..δ_stages.
pub fn construct_stages(f: &[TrigPoly], delta: &[f64], stages: usize, opts: &ConstructOptions) -> Result<Construction> {
    if stages == 0 {
        return Err(Error::Domain("at least one stage".into()));
    }
    if f.len() < stages + 1 || delta.len() < stages {
        return Err(Error::Domain(format!("need f_1..f_{} and δ_1..δ_{stages}", stages + 1)));
    }
    let f = &f[..stages + 1];
    let delta = &delta[..stages];
    let a: Vec<f64> = f.iter().map(TrigPoly::sup_bound).collect();
    if a.iter().any(|x| *x > 1.0) {
        return Err(Error::Domain("‖f_n‖ must be at most 1".into()));
    }
    if a[1..].iter().any(|x| *x > 2.0 / PI) {
        return Err(Error::Domain("the aligned step needs ‖f_n‖ <= 2/π for n >= 2".into()));
    }
    // eps[n] is ε_{n+1}
    let eps = eps_schedule(delta, stages + 1)?;

    let mut blocks = 1u64;
    for n in 1..=stages {
        let need = (2.0 * f[n].lipschitz() / eps[n]).ceil();
        if need > opts.max_blocks as f64 {
            return Err(Error::Budget(format!("{need} blocks needed for f_{}", n + 1)));
        }
        blocks = blocks.max((need as u64).max(1).next_power_of_two());
    }
    if blocks > opts.max_blocks {
        return Err(Error::Budget(format!("{blocks} blocks exceed the cap {}", opts.max_blocks)));
    }

    let quantize = |n: usize| {
        // b^n approximates f_{n+1} within ε_{n+1}
        let e = eps[n];
        let q = 4 * ((PI * a[n] / e).ceil() as u64).max(1);
        BlockConstants::quantize(&f[n], blocks, e / 4.0, q)
    };
    let one = TrigPoly::constant(Complex64::new(1.0, 0.0));
    let mut g = vec![&one - &f[0]];
    let mut mu = LayeredMeasure::lebesgue(blocks)?;

    let m1 = multiple_at_least(&BigInt::from(blocks), g[0].lipschitz().max(f[1].lipschitz()) / eps[1])?;
    let b1 = quantize(1);
    let mut states = vec![ConstructionState {
        stage: 1,
        eps: eps[0],
        k: BigInt::zero(),
        j: BigInt::one(),
        m: m1,
        b: b1,
        variation_bound: 0.0,
        joint_runs: mu.joint_runs(),
        checks: Vec::new(),
    }];
    let first = stage_one_checks(&mu, &states[0], f, &g, &a, &eps, opts);
    states[0].checks = first;
    fail_if_needed(&states[0])?;

    for n in 2..=stages {
        let prev = states.last().unwrap();
        let e = eps[n - 1];
        let xbar = PI / 2.0 * prev.b.max_magnitude();
        let pairs: Vec<(usize, usize, TrigPoly)> = (1..n)
            .flat_map(|m| (1..m).map(move |l| (m, l)))
            .map(|(m, l)| (m, l, &g[m - 1] * &g[l - 1].conj()))
            .collect();
        let l_pairs = pairs.iter().map(|p| p.2.lipschitz()).fold(0.0, f64::max);
        let l_low = 2.0 * PI * (to_f64(&prev.j) - 1.0);
        let l_max = l_pairs.max(l_low);
        let runs = prev.b.runs()?;
        let vprime = spread_variation(&mu, runs.len());
        // x̄L/k <= ε_n for the tests, and the P8 tail 4x̄V'/(3k) <= ε_n/8
        let k = multiple_at_least(&prev.m, (xbar * l_max / e).max(32.0 * xbar * vprime / (3.0 * e)))?;
        if k.bits() > opts.max_k_bits {
            return Err(Error::Budget(format!(
                "stage {n}: k_n has {} bits (cap {}); k_{} = {}, j_{} = {}, m_{} = {}",
                k.bits(),
                opts.max_k_bits,
                n - 1,
                prev.k,
                n - 1,
                prev.j,
                n - 1,
                prev.m
            )));
        }
        let before = mu.clone();
        mu.push_layer(Layer { k: k.clone(), q: prev.b.q, runs })?;
        let v = mu.variation_bound();
        let j = (&prev.j + 1u32).max(ceil_big(v * (1.0 + 1e-9) / (PI * e))?);
        g.push(&TrigPoly::monomial(k.clone(), Complex64::new(1.0, 0.0)) - &f[n - 1]);
        let req = g.iter().map(TrigPoly::lipschitz).fold(f[n].lipschitz(), f64::max) / eps[n];
        let m = multiple_at_least(mu.grid(), req)?;
        let state = ConstructionState {
            stage: n,
            eps: e,
            k,
            j,
            m,
            b: quantize(n),
            variation_bound: v,
            joint_runs: mu.joint_runs(),
            checks: Vec::new(),
        };
        let checks = stage_checks(&before, &mu, prev, &state, &pairs, f, &g, &a, &eps, opts);
        states.push(ConstructionState { checks, ..state });
        fail_if_needed(states.last().unwrap())?;
    }

    let mut final_checks = Vec::new();
    let tail: Vec<f64> = (0..stages).map(|n| eps[n + 1..stages].iter().sum()).collect();
    let gram: Vec<(usize, usize, f64)> = (1..=stages)
        .flat_map(|n| (1..n).map(move |d| (n, d)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(n, d)| (n, d, mu.pair(&(&g[n - 1] * &g[d - 1].conj())).norm()))
        .collect();
    for (n, d, v) in gram {
        let chain = 6.0 * eps[n - 1] + tail[n - 1];
        let detail = format!("|[μ^{stages}, g_{n}·conj(g_{d})]|");
        final_checks.push(CheckEntry::leq(stages, &format!("gram chain {n},{d}"), CheckKind::Computed, v, chain, detail.clone()));
        final_checks.push(CheckEntry::lt(stages, &format!("gram delta {n},{d}"), CheckKind::Computed, v, delta[n - 1], detail));
    }
    let out = Construction { states, measure: mu, f: f.to_vec(), g, eps, delta: delta.to_vec(), final_checks };
    if let Some(c) = out.final_checks.iter().find(|c| !c.pass) {
        return Err(Error::CheckFailed { stage: stages, what: format!("{}: {:.3e} > {:.3e}", c.name, c.value, c.bound) });
    }
    Ok(out)
}

/// Σ_R V(ρ·1_R) over the runs R of the next layer: interior jumps plus both ends of every run.
fn spread_variation(mu: &LayeredMeasure, runs: usize) -> f64 {
    let ends = if runs > 1 { 2.0 * runs as f64 } else { 0.0 };
    mu.variation_bound() + ends * mu.density_bound()
}

fn fail_if_needed(state: &ConstructionState) -> Result<()> {
    let bad: Vec<String> = state
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} ({}) value {:.3e} bound {:.3e}: {}", c.name, c.kind.as_str(), c.value, c.bound, c.detail))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::CheckFailed { stage: state.stage, what: bad.join("; ") })
    }
}

/// P3 for the partition m_n of `state`: analytic bound, sampled values, and the size conditions.
fn p3_checks(state: &ConstructionState, blocks: u64, f: &[TrigPoly], g: &[TrigPoly], a: &[f64], eps: &[f64], opts: &ConstructOptions) -> Vec<CheckEntry> {
    let n = state.stage;
    let e = eps[n];
    let fnext = &f[n];
    let b = &state.b;
    let mut out = Vec::new();
    let f_bound = fnext.lipschitz() / (2.0 * blocks as f64) + b.delta + PI * a[n] / b.q as f64;
    let g_bound = g.iter().map(|gd| gd.lipschitz() / (2.0 * to_f64(&state.m))).fold(0.0, f64::max);
    out.push(CheckEntry::leq(n, "P3", CheckKind::Bound, f_bound.max(g_bound), e, format!("Lipschitz/(2·mesh) + quantization, B = {blocks}, q = {}", b.q)));

    let idx = sample_indices(&state.m, opts.sample_arcs);
    let den4 = &state.m * 4;
    let worst: Vec<(f64, f64)> = idx
        .par_iter()
        .map(|j| {
            let block = ((j * blocks) / &state.m).to_usize().unwrap();
            let bj = b.value(block);
            let cs: Vec<Complex64> = g.iter().map(|gd| arc_constant(gd, &state.m, j)).collect();
            let mut dev: f64 = 0.0;
            for t in [j * 4, j * 4 + 2u32, j * 4 + 3u32] {
                dev = dev.max((fnext.eval_rational(&t, &den4) - bj).norm());
                for (gd, c) in g.iter().zip(&cs) {
                    dev = dev.max((gd.eval_rational(&t, &den4) - c).norm());
                }
            }
            (dev, cs.iter().map(|c| c.norm()).fold(0.0, f64::max))
        })
        .collect();
    let dev = worst.iter().map(|w| w.0).fold(0.0, f64::max);
    let cmax = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    out.push(CheckEntry::leq(n, "P3", CheckKind::Sampled, dev, e, format!("{} arcs of m_{n}, 3 points each", idx.len())));
    out.push(CheckEntry::leq(n, "P3 |c|", CheckKind::Sampled, cmax, 2.0, "midpoint constants of g_d".into()));
    out.push(CheckEntry::leq(n, "P3 |b|", CheckKind::Computed, b.max_magnitude(), a[n], format!("all {blocks} blocks against a_{}", n + 1)));
    out
}

fn stage_one_checks(mu: &LayeredMeasure, state: &ConstructionState, f: &[TrigPoly], g: &[TrigPoly], a: &[f64], eps: &[f64], opts: &ConstructOptions) -> Vec<CheckEntry> {
    let mut out = p3_checks(state, mu.blocks(), f, g, a, eps, opts);
    let ls = sample_freqs(&state.j, &(&state.j * 64), opts.sample_freqs);
    let top = fourier_many(mu, &ls).iter().map(|z| z.norm()).fold(0.0, f64::max);
    out.push(CheckEntry::leq(1, "P6", CheckKind::Bound, 0.0, eps[0], "Lebesgue: μ̂(l) = 0 for l ≠ 0".into()));
    out.push(CheckEntry::leq(1, "P6", CheckKind::Sampled, top, eps[0], format!("{} frequencies with |l| >= j_1", ls.len())));
    out
}

#[allow(clippy::too_many_arguments)]
fn stage_checks(
    before: &LayeredMeasure,
    mu: &LayeredMeasure,
    prev: &ConstructionState,
    state: &ConstructionState,
    pairs: &[(usize, usize, TrigPoly)],
    f: &[TrigPoly],
    g: &[TrigPoly],
    a: &[f64],
    eps: &[f64],
    opts: &ConstructOptions,
) -> Vec<CheckEntry> {
    let n = state.stage;
    let e = eps[n - 1];
    let (k, j, m) = (&state.k, &state.j, &state.m);
    let mprev = &prev.m;
    let xbar = PI / 2.0 * prev.b.max_magnitude();
    let blocks = mu.blocks();
    let mut out = Vec::new();

    out.push(CheckEntry::exact(
        n,
        "P1",
        &prev.k < k && &prev.j < j && mprev < m,
        format!("k: {} -> {k}, j: {} -> {j}, m: {mprev} -> {m}", prev.k, prev.j),
    ));
    out.push(CheckEntry::exact(n, "P2", m.is_multiple_of(mprev), format!("m_{} | m_{n}", n - 1)));
    out.extend(p3_checks(state, blocks, f, g, a, eps, opts));

    // P4 and P5 on sampled arcs of m_{n-1}
    out.push(CheckEntry::exact(n, "P4", mu.structure_ok() && k.is_multiple_of(mprev) && mprev.is_multiple_of(before.grid()), "k_n multiple of m_{n-1}, m_{n-1} multiple of the previous grid, balanced patterns".into()));
    let idx = sample_indices(mprev, opts.sample_arcs);
    let arc_stats: Vec<(f64, f64)> = idx
        .par_iter()
        .map(|jj| {
            let arc = CircleArc::uniform(mprev, jj).expect("index inside the partition");
            let old = before.mass_on(&arc);
            let new = mu.mass_on(&arc);
            let block = ((jj * blocks) / mprev).to_usize().unwrap();
            let bj = prev.b.value(block);
            let coef = mu.fourier_on_arc(k, &arc);
            ((new - old).abs() / old, (coef - bj * new).norm())
        })
        .collect();
    let mass_dev = arc_stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let p5 = arc_stats.iter().map(|s| s.1).fold(0.0, f64::max);
    let arcs_detail = format!("{} arcs of m_{}", idx.len(), n - 1);
    out.push(CheckEntry::leq(n, "P4", CheckKind::Sampled, mass_dev, MASS_TOL, format!("relative mass change, {arcs_detail}")));
    let p5_bound = e / to_f64(mprev);
    out.push(CheckEntry::leq(n, "P5", CheckKind::Sampled, p5, p5_bound, arcs_detail.clone()));

    // Fourier samples shared by P6, P7, P8
    let v = state.variation_bound;
    out.push(CheckEntry::leq(n, "P6", CheckKind::Bound, v / (PI * to_f64(j)), e, format!("V/(π j_n), V <= {v:.3e}")));
    let high = sample_freqs(j, &(j * 64), opts.sample_freqs);
    let low = sample_freqs(&BigInt::zero(), &prev.j, opts.sample_freqs);
    let mut mid = vec![k.clone(), k + 1u32, k * 2, (k * 74) / 100, (k * 3) / 2, k - 1u32];
    mid.extend(mid.clone().into_iter().map(|l| -l));
    let mut all: Vec<BigInt> = high.iter().chain(&low).chain(&mid).cloned().collect();
    if let Some(r) = (j + k - 1u32).checked_div(k) {
        all.push(r * k);
    }
    all.sort();
    all.dedup();
    let now = fourier_many(mu, &all);
    let then = fourier_many(before, &all);
    let is_high = |l: &BigInt| l.abs() >= *j;
    let is_low = |l: &BigInt| l.abs() < prev.j;
    let p6 = all.iter().zip(&now).filter(|(l, _)| is_high(l)).map(|(_, z)| z.norm()).fold(0.0, f64::max);
    let p7 = all.iter().zip(now.iter().zip(&then)).filter(|(l, _)| is_low(l)).map(|(_, (x, y))| (x - y).norm()).fold(0.0, f64::max);
    let p8 = now.iter().zip(&then).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    out.push(CheckEntry::leq(n, "P6", CheckKind::Sampled, p6, e, format!("{} frequencies with |l| >= j_{n}", all.iter().filter(|l| is_high(l)).count())));
    let l_low = 2.0 * PI * (to_f64(&prev.j) - 1.0);
    out.push(CheckEntry::leq(n, "P7", CheckKind::Bound, xbar * l_low / (2.0 * to_f64(k)), e, "x̄·2π(j_{n-1}−1)/(2k_n)".into()));
    out.push(CheckEntry::leq(n, "P7", CheckKind::Sampled, p7, e, format!("{} frequencies with |l| < j_{}", all.iter().filter(|l| is_low(l)).count(), n - 1)));
    let a_next = a[n];
    // v − 1 = Σ_{m odd} c_m e^{2πims} with |c_m| = |b|/|m|: the nearest harmonic gives max|b|, the
    // others sum to at most 4x̄V'/(3k) with V' the variation of ρ_{n-1} cut along the runs
    let bmax = prev.b.max_magnitude();
    let harmonic = bmax + 4.0 * xbar * spread_variation(before, prev.b.runs().map(|r| r.len()).unwrap_or(0)) / (3.0 * to_f64(k));
    let p8_bound = harmonic.min(PATTERN_GAIN * xbar);
    out.push(CheckEntry::leq(n, "P8", CheckKind::Bound, p8_bound, 2.0 * a_next, format!("min(max|b| + tail, gain·x̄) against 2a_{}", n + 1)));
    out.push(CheckEntry::leq(n, "P8 lemma form", CheckKind::Bound, p8_bound, 2.0 * bmax.max(1e-300), "against 2 max|b^{n-1}|".into()));
    out.push(CheckEntry::leq(n, "P8", CheckKind::Sampled, p8, 2.0 * a_next, format!("{} frequencies", all.len())));

    // P9 over every pair, closed form
    let l_pairs = pairs.iter().map(|p| p.2.lipschitz()).fold(0.0, f64::max);
    out.push(CheckEntry::lt(n, "P9", CheckKind::Bound, xbar * l_pairs / (2.0 * to_f64(k)), e, "x̄·L/(2k_n) over g_m·conj(g_l)".into()));
    let p9 = pairs
        .par_iter()
        .map(|(_, _, p)| (mu.pair(p) - before.pair(p)).norm())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    out.push(CheckEntry::lt(n, "P9", CheckKind::Computed, p9, e, format!("{} pairs", pairs.len())));

    // the rotation-step conditions in their own terms
    out.push(CheckEntry::leq(n, "B1", CheckKind::Sampled, mass_dev, MASS_TOL, "arc masses of m_{n-1} kept".into()));
    out.push(CheckEntry::lt(n, "B2", CheckKind::Computed, p9.max(p7), e, "P9 pairs and sampled z^l, |l| < j_{n-1}".into()));
    out.push(CheckEntry::lt(n, "B3", CheckKind::Sampled, p5, e, "restricted coefficients at k_n".into()));
    out.push(CheckEntry::leq(n, "B4", CheckKind::Sampled, p8, 2.0 * a_next + 1e-9, format!("against 2a_{} + 1e-9", n + 1)));
    out
}
