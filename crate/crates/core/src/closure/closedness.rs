//! Weak closedness from norm growth, the row-sum lemma, and orbit statistics of shifts.

use super::divergence::{weak_zero_divergence, CoefSeq, DivergenceVerdict, Exponent};
use super::series::{PartialSums, Trend};
use crate::criteria::salas::salas_simplified_stats;
use crate::error::{Error, Result};
use crate::lattice::{apply_shift, pnorm, Idx, LogMag, PExp, WeightSequence, ZVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceKind {
    Hilbert,
    Lp(f64),
    Banach,
}

/// Distance below min{2, q} used for the exponent in ℓ_p, where the bound itself is not admissible.
pub const LP_EXPONENT_MARGIN: f64 = 1e-2;

impl SpaceKind {
    /// The exponent a for which Σ ‖x_n‖^{-a} < ∞ implies weak closedness.
    pub fn exponent(self) -> Result<f64> {
        match self {
            SpaceKind::Hilbert => Ok(2.0),
            SpaceKind::Banach => Ok(1.0),
            SpaceKind::Lp(p) => {
                if !(p > 1.0 && p.is_finite()) {
                    return Err(Error::Domain(format!("closedness in l_p needs 1 < p < inf, got {p}")));
                }
                let q = p / (p - 1.0);
                Ok(2f64.min(q) - LP_EXPONENT_MARGIN)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClosednessVerdict {
    pub a: f64,
    pub series: DivergenceVerdict,
    /// Σ ‖x_n‖^{-a} converges (at horizon, or certified by a tail).
    pub closed: bool,
}

/// Tests Σ ‖x_n‖^{-a} for convergence with the largest exponent the space allows.
pub fn closedness_certificate(norms: &CoefSeq, space: SpaceKind, horizon: u64) -> Result<ClosednessVerdict> {
    let a = space.exponent()?;
    let series = weak_zero_divergence(norms, Exponent::Finite(a.max(1.0)), horizon)?;
    let series = if a < 1.0 { rescale(norms, a, horizon)? } else { series };
    let closed = !series.zero_coefficient && series.trend == Trend::ConvergingAtHorizon;
    Ok(ClosednessVerdict { a, series, closed })
}

// exponents below 1 (ℓ_p with q near 1) go through c^a with exponent 1
fn rescale(norms: &CoefSeq, a: f64, horizon: u64) -> Result<DivergenceVerdict> {
    let f = norms.f.clone();
    let c = CoefSeq::from_fn(format!("{}^{a}", norms.label), move |n| f(n).powf(a));
    weak_zero_divergence(&c, Exponent::Finite(1.0), horizon)
}

/// Flags f as not weakly supercyclic when Σ r_n^a < ∞ for the orbit ratios r_n = |⟨Tⁿf,y⟩|/‖Tⁿf‖.
pub fn not_weakly_supercyclic(ratios: &[f64], space: SpaceKind) -> Result<(f64, PartialSums, bool)> {
    let a = space.exponent()?;
    let terms: Vec<f64> = ratios.iter().map(|r| r.abs().powf(a)).collect();
    let sums = PartialSums::from_terms(&terms);
    let flag = sums.trend() == Trend::ConvergingAtHorizon;
    Ok((a, sums, flag))
}

#[derive(Clone, Debug)]
pub struct RowSumReport {
    /// Row sums in increasing order.
    pub sorted: Vec<f64>,
    /// Every S_(j) >= j/2 (1-based j).
    pub half_bound: bool,
    /// Partial sums of S^{-r}.
    pub sums: PartialSums,
    /// Σ_{j<=n} (j/2)^{-r}, the comparison bound.
    pub bound: f64,
}

/// Row sums of a non-negative matrix with max{a_jk, a_kj} >= 1 for all pairs.
pub fn row_sum_check(a: &[Vec<f64>], r: f64) -> Result<RowSumReport> {
    let n = a.len();
    if !(r > 1.0) {
        return Err(Error::Domain(format!("row-sum exponent must exceed 1, got {r}")));
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Domain("matrix must be square".into()));
        }
        if row.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Domain(format!("row {i} has a negative entry")));
        }
    }
    for j in 0..n {
        for k in j..n {
            if a[j][k].max(a[k][j]) < 1.0 {
                return Err(Error::CheckFailed { stage: 0, what: format!("max(a[{j}][{k}], a[{k}][{j}]) < 1") });
            }
        }
    }
    let mut sorted: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    sorted.sort_by(f64::total_cmp);
    let half_bound = sorted.iter().enumerate().all(|(j, s)| *s >= (j + 1) as f64 / 2.0);
    let terms: Vec<f64> = sorted.iter().map(|s| s.powf(-r)).collect();
    let bound = (1..=n).map(|j| (j as f64 / 2.0).powf(-r)).sum();
    Ok(RowSumReport { sorted, half_bound, sums: PartialSums::from_terms(&terms), bound })
}

/// n ↦ |⟨Tⁿf, y⟩| / ‖Tⁿf‖_p for a weighted shift, n in the given range.
pub fn shift_orbit_ratios(w: &WeightSequence, f: &ZVector, y: &ZVector, p: PExp, range: std::ops::RangeInclusive<Idx>) -> Result<Vec<(Idx, f64)>> {
    if f.is_empty() {
        return Err(Error::Domain("f must be nonzero".into()));
    }
    let mut out = Vec::new();
    for n in range {
        let tf = apply_shift(w, f, n);
        let norm = pnorm(&tf, p).ok_or_else(|| Error::Domain(format!("T^{n} f vanished")))?;
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        for (i, e) in tf.iter() {
            if let Some(g) = y.get(i) {
                // pairing divided by the norm, formed in log space
                s += e.phase * g.phase.conj() * (e.mag + g.mag - norm).to_linear_saturating();
            }
        }
        out.push((n, s.norm()));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SetAReport {
    pub m: Idx,
    /// c = min over n of max{β(m-n+1,m), β(m+1,m+n)^{-1}}, capped at 1.
    pub c: LogMag,
    /// k with |⟨T^k x, e_m⟩| > 1.
    pub a_set: Vec<Idx>,
    /// |x_{k+m}| > β(m+1, m+k)^{-1} on A.
    pub bound_531: bool,
    /// max{a_jk, a_kj} >= 1 on A × A.
    pub pair_condition: bool,
    /// ‖T^j x‖_p^p >= c^p Σ_{k∈A} a_jk on A.
    pub norm_inequality: bool,
    pub rows: Option<RowSumReport>,
}

/// The set A = {k : |⟨T^k x, e_m⟩| > 1} with the bounds used against weak hypercyclicity.
pub fn set_a_statistic(w: &WeightSequence, x: &ZVector, m: Idx, horizon: Idx, p: f64, r: f64) -> Result<SetAReport> {
    let mut c = LogMag::UNIT;
    for n in 1..=horizon {
        c = c.min(salas_simplified_stats(w, m, n).0);
    }
    let mut a_set = Vec::new();
    let mut bound_531 = true;
    for k in 1..=horizon {
        // ⟨T^k x, e_m⟩ = x_{m+k} β(m+1, m+k)
        if let Some(e) = x.get(m + k) {
            let v = e.mag + w.beta_or_unit(m + 1, m + k);
            if v.0 > 0.0 {
                a_set.push(k);
                bound_531 &= e.mag > w.beta_or_unit(m + 1, m + k).inv();
            }
        }
    }
    let entry = |j: Idx, k: Idx| -> f64 {
        let b = if k == j {
            LogMag::UNIT
        } else if k < j {
            w.beta_or_unit(m + k - j + 1, m) * p
        } else {
            w.beta_or_unit(m + 1, m + k - j).inv() * p
        };
        (b - c * p).to_linear_saturating()
    };
    let mut pair_condition = true;
    let mut norm_inequality = true;
    let mut matrix = Vec::with_capacity(a_set.len());
    for &j in &a_set {
        let row: Vec<f64> = a_set.iter().map(|&k| entry(j, k)).collect();
        let tj = pnorm(&apply_shift(w, x, j), PExp::Finite(p)).map(|v| (v * p).to_linear_saturating()).unwrap_or(0.0);
        let rhs = c.pow(p).to_linear_saturating() * row.iter().sum::<f64>();
        norm_inequality &= tj >= rhs * (1.0 - 1e-12);
        matrix.push(row);
    }
    for (i, &_j) in a_set.iter().enumerate() {
        for (l, _) in a_set.iter().enumerate() {
            pair_condition &= matrix[i][l].max(matrix[l][i]) >= 1.0 - 1e-12;
        }
    }
    let rows = if pair_condition && !a_set.is_empty() { row_sum_check(&matrix, r).ok() } else { None };
    Ok(SetAReport { m, c, a_set, bound_531, pair_condition, norm_inequality, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::families::WeightFamily;

    #[test]
    fn exponential_norms_closed_in_banach() {
        let v = closedness_certificate(&CoefSeq::from_fn("2^n", |n| 2f64.powi(n as i32)), SpaceKind::Banach, 200).unwrap();
        assert!(v.closed);
        assert!((v.series.sums.total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_norms_not_closed_in_hilbert() {
        let v = closedness_certificate(&CoefSeq::power(0.5), SpaceKind::Hilbert, 100_000).unwrap();
        assert!(!v.closed);
    }

    #[test]
    fn row_sum_examples() {
        let n = 12;
        let ones = vec![vec![1.0; n]; n];
        let rep = row_sum_check(&ones, 2.0).unwrap();
        assert!(rep.sorted.iter().all(|s| *s == n as f64) && rep.half_bound);
        let upper: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| if j <= k { 1.0 } else { 0.0 }).collect()).collect();
        let rep = row_sum_check(&upper, 2.0).unwrap();
        assert_eq!(rep.sorted, (1..=n).map(|j| j as f64).collect::<Vec<_>>());
        assert!(row_sum_check(&vec![vec![0.0; 3]; 3], 2.0).is_err());
    }

    #[test]
    fn unit_shift_ratio_hits_one_index() {
        let w = WeightFamily::Unweighted.sequence().unwrap();
        let r = shift_orbit_ratios(&w, &ZVector::basis(0), &ZVector::basis(5), PExp::Finite(2.0), -10..=10).unwrap();
        for (n, v) in r {
            assert_eq!(v, if n == -5 { 1.0 } else { 0.0 });
        }
    }
}
