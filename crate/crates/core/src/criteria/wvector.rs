//! Truncations of the vector u = Σ ρ_n T^{-r_n} κ(n) behind the W-conditions, with support bookkeeping.

use crate::criteria::kappa::{build_kappa, default_targets, Kappa};
use crate::criteria::wcert::WCertificate;
use crate::error::{Error, Result};
use crate::lattice::{apply_shift, pnorm, Idx, LogMag, PExp, WeightSequence, ZVector};

/// Where the tail condition first holds: an exact index, or only a lower bound on ln m_k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailIndex {
    Exact(u64),
    Beyond { ln_lower: f64 },
}

impl TailIndex {
    /// True when the index is at least n.
    pub fn at_least(&self, n: u64) -> bool {
        match self {
            TailIndex::Exact(m) => *m >= n,
            TailIndex::Beyond { ln_lower } => *ln_lower >= (n.max(1) as f64).ln(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WVectorOptions {
    pub stages: usize,
    /// Re-indexing: r_n, α_n, ρ_n are replaced by r_{n+shift}, … ; `None` picks the smallest shift with a_0 >= 1.
    pub shift: Option<u64>,
    /// Explicit summation range for the tail indices m_k.
    pub tail_horizon: u64,
    /// Length of the computed a sequence.
    pub a_len: usize,
    pub targets: usize,
}

impl Default for WVectorOptions {
    fn default() -> Self {
        WVectorOptions { stages: 6, shift: None, tail_horizon: 1_000_000, a_len: 64, targets: 8 }
    }
}

#[derive(Clone, Debug)]
pub struct WVector {
    pub u: ZVector,
    pub shift: u64,
    pub r: Vec<Idx>,
    pub a: Vec<u64>,
    pub m: Vec<TailIndex>,
    pub kappa: Kappa,
    /// ρ_n T^{-r_n} κ(n) for n < stages.
    pub summands: Vec<ZVector>,
    pub summands_disjoint: bool,
    /// ‖u‖_p^p against Σ ρ_n^p ‖T^{-r_n} κ(n)‖_p^p.
    pub norm_pow: f64,
    pub norm_pow_sum: f64,
    /// Largest ratio ‖T^{-r_n} κ(n)‖ / (α_n β(1,r_n)^{-1}); must be <= 1.
    pub minus_ratio: f64,
    /// y_k + z_k of the stage decomposition, k = 1..stages.
    pub yz: Vec<ZVector>,
    pub yz_disjoint: bool,
    /// Gap inequality |(r_n - r_k) - (r_m - r_l)| > a_n + a_m over all admissible index tuples.
    pub gap_condition: bool,
    /// Bound on the p-th power of the omitted tail Σ_{n>=stages} ρ_n^p ‖T^{-r_n} κ(n)‖^p.
    pub tail_bound: Option<f64>,
}

/// Largest integer a >= 0 with a·c^{2a} <= alpha.
fn an2_cap(alpha: f64, log2_c: f64) -> u64 {
    let mut a = 0u64;
    while ((a + 1) as f64).log2() + 2.0 * (a + 1) as f64 * log2_c <= alpha.log2() {
        a += 1;
    }
    a
}

/// The greedy a sequence: largest non-decreasing integers under the individual caps,
/// then lowered until a_n + a_{n-1} < r_n - r_{n-1} - r_{n-2}.
fn greedy_a(caps: &[u64], r: &[Idx]) -> Vec<u64> {
    let l = caps.len();
    let mut a = caps.to_vec();
    loop {
        for n in (0..l.saturating_sub(1)).rev() {
            a[n] = a[n].min(a[n + 1]);
        }
        let mut changed = false;
        for n in (2..l).rev() {
            let d = r[n] - r[n - 1] - r[n - 2];
            while (a[n] + a[n - 1]) as Idx >= d {
                if a[n - 1] > 0 {
                    a[n - 1] -= 1;
                } else if a[n] > 0 {
                    a[n] -= 1;
                } else {
                    break;
                }
                changed = true;
            }
        }
        if !changed {
            return a;
        }
    }
}

struct Shifted<'a> {
    cert: &'a WCertificate,
    shift: u64,
}

impl Shifted<'_> {
    fn r(&self, n: u64) -> Option<Idx> {
        self.cert.r.get(n + self.shift)
    }
    fn alpha(&self, n: u64) -> f64 {
        (self.cert.alpha)(n + self.shift)
    }
    fn rho(&self, n: u64) -> f64 {
        (self.cert.rho)(n + self.shift)
    }
}

/// m_k: first index where Σ_{n>=m} ρ_n^p α_n^p β(1, r_n - r_k)^{-p} < ρ_k^p 2^{-pk}.
fn tail_indices(w: &WeightSequence, s: &Shifted, stages: usize, horizon: u64) -> Result<Vec<TailIndex>> {
    let p = s.cert.p;
    if !w.is_unit() {
        return Err(Error::Domain("tail indices need unit weights or a closed-form tail".into()));
    }
    // unit weights: the terms do not depend on k
    let terms: Vec<f64> = (0..horizon).map(|n| (s.rho(n) * s.alpha(n)).powf(p)).collect();
    let declared = s.cert.w3_tail.as_ref();
    let beyond = declared.map(|f| f(horizon + s.shift)).unwrap_or(f64::INFINITY);
    // suffix sums
    let mut suffix = vec![0f64; terms.len() + 1];
    *suffix.last_mut().unwrap() = beyond;
    for i in (0..terms.len()).rev() {
        suffix[i] = suffix[i + 1] + terms[i];
    }
    let mut out = Vec::with_capacity(stages);
    let mut prev: Option<u64> = None;
    for k in 0..stages {
        let budget = s.rho(k as u64).powf(p) * 2f64.powf(-p * k as f64);
        let lo = prev.map(|m| m + 1).unwrap_or(1);
        let found = (lo..horizon).find(|&m| suffix[m as usize] < budget);
        match found {
            Some(m) => {
                out.push(TailIndex::Exact(m));
                prev = Some(m);
            }
            None => {
                let f = declared.ok_or_else(|| Error::Budget("tail condition not met within the horizon".into()))?;
                // the declared tail ln^{1-p}(N)/(p-1) falls below the budget once ln N exceeds this
                let ln_n = ((p - 1.0) * budget).powf(-1.0 / (p - 1.0));
                debug_assert!(f(horizon) >= budget);
                out.push(TailIndex::Beyond { ln_lower: ln_n });
                prev = Some(u64::MAX - 1);
            }
        }
    }
    Ok(out)
}

/// Builds the truncation of u over `stages` summands and checks the support conditions.
pub fn build_w_vector(w: &WeightSequence, cert: &WCertificate, opts: &WVectorOptions) -> Result<WVector> {
    if !w.is_unit() {
        return Err(Error::Domain("the vector construction is implemented for unit weights".into()));
    }
    let p = cert.p;
    let shift = match opts.shift {
        Some(s) => s,
        None => (0..64)
            .find(|&s| {
                let sh = Shifted { cert, shift: s };
                let caps = a_caps(&sh, 2, &[TailIndex::Beyond { ln_lower: f64::INFINITY }; 2], 0.0);
                caps.map(|c| c[0] >= 1).unwrap_or(false)
            })
            .ok_or_else(|| Error::Domain("no shift gives a nonzero first stage".into()))?,
    };
    let s = Shifted { cert, shift };
    let len = opts.a_len.max(opts.stages + 1);
    let m = tail_indices(w, &s, len, opts.tail_horizon)?;
    let log2_c = w.two_sided_constant().0;
    let caps = a_caps(&s, len, &m, log2_c)?;
    let r: Vec<Idx> = (0..len as u64).map(|n| s.r(n).ok_or_else(|| Error::Domain("r overflows".into()))).collect::<Result<_>>()?;
    let a = greedy_a(&caps, &r);

    let a_fn = |k: u64| -> f64 { a.get(k as usize).copied().unwrap_or(*a.last().unwrap()) as f64 };
    let kappa = build_kappa(default_targets(opts.targets), &a_fn, PExp::Finite(p), len as u64 - 1);

    let mut summands = Vec::with_capacity(opts.stages);
    let mut minus_ratio = 0f64;
    let mut norm_pow_sum = 0f64;
    for n in 0..opts.stages {
        let x = kappa.get(n as u64);
        let v = apply_shift(w, &x, -r[n]);
        if let Some(nv) = pnorm(&v, PExp::Finite(p)) {
            // ‖T^{-r_n} κ(n)‖ <= α_n β(1, r_n)^{-1}
            let bound = LogMag::from_linear(s.alpha(n as u64)).unwrap() - w.beta_or_unit(1, r[n]);
            minus_ratio = minus_ratio.max((nv - bound).to_linear_saturating());
            norm_pow_sum += (s.rho(n as u64) * nv.to_linear_saturating()).powf(p);
        }
        summands.push(v.scale(LogMag::from_linear(s.rho(n as u64)).unwrap()));
    }
    let mut u = ZVector::zero();
    let mut summands_disjoint = true;
    for v in &summands {
        match u.disjoint_union(v) {
            Some(next) => u = next,
            None => summands_disjoint = false,
        }
    }
    let norm_pow = pnorm(&u, PExp::Finite(p)).map(|n| n.to_linear_saturating().powf(p)).unwrap_or(0.0);

    // y_k + z_k: the summands with n != k and a_n < (r_k - r_{k-1})/2, moved by T^{r_k}
    let mut yz = Vec::new();
    for k in 1..opts.stages {
        let mut acc = ZVector::zero();
        for n in 0..opts.stages {
            if n == k || 2 * a[n] as Idx >= r[k] - r[k - 1] {
                continue;
            }
            let part = apply_shift(w, &summands[n], r[k]);
            acc = acc.disjoint_union(&part).ok_or(Error::SupportCollision {
                index: part.support().next().unwrap_or(0),
                first: k,
                second: n,
            })?;
        }
        yz.push(acc);
    }
    let mut yz_disjoint = true;
    for i in 0..yz.len() {
        for j in i + 1..yz.len() {
            yz_disjoint &= yz[i].supports_disjoint(&yz[j]);
        }
    }
    let gap_condition = gap_check(&r, &a, opts.stages);
    let tail_bound = cert.w3_tail.as_ref().map(|f| {
        let explicit: f64 = (opts.stages as u64..opts.tail_horizon).map(|n| (s.rho(n) * s.alpha(n)).powf(p)).sum();
        explicit + f(opts.tail_horizon + shift)
    });
    Ok(WVector {
        u,
        shift,
        r,
        a,
        m,
        kappa,
        summands,
        summands_disjoint,
        norm_pow,
        norm_pow_sum,
        minus_ratio,
        yz,
        yz_disjoint,
        gap_condition,
        tail_bound,
    })
}

fn a_caps(s: &Shifted, len: usize, m: &[TailIndex], log2_c: f64) -> Result<Vec<u64>> {
    let r: Vec<Idx> = (0..len as u64).map(|n| s.r(n).ok_or_else(|| Error::Domain("r overflows".into()))).collect::<Result<_>>()?;
    let mut caps = Vec::with_capacity(len);
    for n in 0..len {
        let mut cap = an2_cap(s.alpha(n as u64), log2_c);
        // 2 a_{m_k} < r_k - r_{k-1}; a is non-decreasing, so the cap covers every n <= m_k
        for k in 1..len.min(m.len()) {
            if m[k].at_least(n as u64) {
                let gap = r[k] - r[k - 1];
                let c = if gap <= 0 { 0 } else { ((gap - 1) / 2) as u64 };
                cap = cap.min(c);
            }
        }
        caps.push(cap);
    }
    Ok(caps)
}

/// |(r_n - r_k) - (r_m - r_l)| > a_n + a_m for k > l >= 1, n != k, m != l, with a_n, a_m under the half-gaps.
fn gap_check(r: &[Idx], a: &[u64], stages: usize) -> bool {
    for k in 1..stages {
        for l in 1..k {
            for n in 0..stages {
                if n == k || 2 * a[n] as Idx >= r[k] - r[k - 1] {
                    continue;
                }
                for mm in 0..stages {
                    if mm == l || 2 * a[mm] as Idx >= r[l] - r[l - 1] {
                        continue;
                    }
                    if ((r[n] - r[k]) - (r[mm] - r[l])).abs() <= (a[n] + a[mm]) as Idx {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::families::WeightFamily;

    #[test]
    fn single_stage_support() {
        let w = WeightFamily::Unweighted.sequence().unwrap();
        let cert = WCertificate::log_certificate(3.0);
        let v = build_w_vector(&w, &cert, &WVectorOptions { stages: 1, ..Default::default() }).unwrap();
        assert!(v.u.support().all(|i| (i - v.r[0]).unsigned_abs() <= v.a[0] as u128));
    }

    #[test]
    fn greedy_a_respects_pair_gaps() {
        let r = vec![1, 2, 4, 8, 16];
        let a = greedy_a(&[5, 5, 5, 5, 5], &r);
        for n in 2..5 {
            assert!(((a[n] + a[n - 1]) as Idx) < r[n] - r[n - 1] - r[n - 2]);
        }
        assert!(a.windows(2).all(|p| p[0] <= p[1]));
    }
}
