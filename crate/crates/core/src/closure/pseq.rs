//! p-sequence evidence: Gram bounds, perturbations, and the orbit certificate built on them.

use num_complex::Complex64;

use super::divergence::{weak_zero_divergence, CoefSeq, DivergenceVerdict, Exponent};
use super::series::{PartialSums, Trend};
use crate::error::Result;
use crate::lattice::{pnorm, PExp, ZVector};

#[derive(Clone, Debug)]
pub struct GramStats {
    /// sup ‖g_n‖.
    pub d: f64,
    /// Σ_{m<n} |⟨g_n, g_m⟩|².
    pub c: f64,
    /// (d² + √(2c))^{1/2}.
    pub bound: f64,
    /// c(N) = Σ_{m<n<N} |⟨g_n,g_m⟩|² at decade checkpoints.
    pub c_sums: PartialSums,
    /// False when c keeps growing with the list length.
    pub certified: bool,
}

/// Gram statistics of g_0..g_{N-1} from their norms and pairwise inner products.
pub fn gram_2seq_bound(norms: &[f64], inner: impl Fn(usize, usize) -> Complex64) -> GramStats {
    let d = norms.iter().copied().fold(0.0, f64::max);
    // row n contributes Σ_{m<n} |⟨g_n,g_m⟩|²
    let rows: Vec<f64> = (0..norms.len()).map(|n| (0..n).map(|m| inner(n, m).norm_sqr()).sum()).collect();
    let c_sums = PartialSums::from_terms(&rows);
    let c = c_sums.total;
    let certified = c == 0.0 || c_sums.trend() != Trend::DivergingAtHorizon;
    GramStats { d, c, bound: (d * d + (2.0 * c).sqrt()).sqrt(), c_sums, certified }
}

/// Gram statistics for vectors in ℓ₂(Z).
pub fn gram_of_zvectors(v: &[ZVector]) -> GramStats {
    let norms: Vec<f64> = v.iter().map(|x| pnorm(x, PExp::Finite(2.0)).map(|m| m.to_linear_saturating()).unwrap_or(0.0)).collect();
    gram_2seq_bound(&norms, |a, b| inner_l2(&v[a], &v[b]))
}

/// ⟨x, y⟩ = Σ x_n conj(y_n).
pub fn inner_l2(x: &ZVector, y: &ZVector) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (n, e) in x.iter() {
        if let Some(f) = y.get(n) {
            let mag = (e.mag + f.mag).to_linear_saturating();
            s += e.phase * f.phase.conj() * mag;
        }
    }
    s
}

#[derive(Clone, Debug)]
pub struct PerturbationBound {
    /// c + ‖deltas‖_q.
    pub constant: f64,
    pub deltas_norm: f64,
    /// True when summability is certified by a declared tail or a finite list.
    pub certified: bool,
}

/// Constant of the perturbed p-sequence, or `None` when the gaps are not summable at the horizon.
pub fn pseq_perturbation_bound(c: f64, deltas: &[f64], q: Exponent, tail: Option<f64>) -> Option<PerturbationBound> {
    match q {
        Exponent::Infinity => {
            let m = deltas.iter().copied().fold(0.0, |a: f64, b| a.max(b.abs()));
            Some(PerturbationBound { constant: c + m.max(tail.unwrap_or(0.0)), deltas_norm: m, certified: true })
        }
        Exponent::Finite(q) => {
            let terms: Vec<f64> = deltas.iter().map(|d| d.abs().powf(q)).collect();
            let sums = PartialSums::from_terms(&terms);
            let certified = tail.is_some();
            if !certified && !terms.is_empty() && sums.total > 0.0 && sums.trend() != Trend::ConvergingAtHorizon {
                return None;
            }
            let norm = (sums.total + tail.unwrap_or(0.0)).powf(1.0 / q);
            Some(PerturbationBound { constant: c + norm, deltas_norm: norm, certified })
        }
    }
}

/// What backs (C1) for one sample vector.
#[derive(Clone, Debug)]
pub enum PSeqEvidence {
    /// A family with pairwise disjoint supports in ℓ_p: a p-sequence with constant sup ‖v‖.
    DisjointSupports { vectors: Vec<ZVector>, p: f64 },
    /// A Hilbert-space family with its Gram statistics (p = 2).
    Gram(GramStats),
    /// A constant established elsewhere, with the p it refers to.
    Declared { constant: f64, p: f64 },
    Missing,
}

#[derive(Clone, Debug)]
pub struct SampleEvidence {
    pub label: String,
    pub c1: PSeqEvidence,
    /// |α_x(k)| over the truncated index set A_x.
    pub alpha: Vec<f64>,
    /// Exponent conjugate to the p of (C1).
    pub q: f64,
    /// α_x = β_x for this sample.
    pub alpha_is_beta: bool,
}

#[derive(Clone, Debug)]
pub struct SampleResult {
    pub label: String,
    pub c1_constant: Option<f64>,
    pub c2: DivergenceVerdict,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct OrbitCertificate {
    pub samples: Vec<SampleResult>,
    pub weakly_supercyclic: bool,
    pub weakly_hypercyclic: bool,
}

/// Checks (C1) and (C2) for every sample and aggregates them.
pub fn orbit_certificate(samples: &[SampleEvidence], samples_dense: bool) -> Result<OrbitCertificate> {
    let mut out = Vec::new();
    for s in samples {
        let (c1_constant, note) = match &s.c1 {
            PSeqEvidence::DisjointSupports { vectors, p } => {
                let mut ok = true;
                for i in 0..vectors.len() {
                    for j in i + 1..vectors.len() {
                        ok &= vectors[i].supports_disjoint(&vectors[j]);
                    }
                }
                let sup = vectors
                    .iter()
                    .filter_map(|v| pnorm(v, PExp::Finite(*p)))
                    .map(|m| m.to_linear_saturating())
                    .fold(0.0, f64::max);
                if ok {
                    (Some(sup), "disjoint supports".to_string())
                } else {
                    (None, "supports overlap".to_string())
                }
            }
            PSeqEvidence::Gram(g) if g.certified => (Some(g.bound), "Gram bound".into()),
            PSeqEvidence::Gram(_) => (None, "Gram sum not summable at horizon".into()),
            PSeqEvidence::Declared { constant, .. } => (Some(*constant), "declared constant".into()),
            PSeqEvidence::Missing => (None, "no p-sequence evidence".into()),
        };
        // (C2): Σ |α|^q = ∞ is Σ |1/α|^{-q} = ∞
        let alpha = s.alpha.clone();
        let c = CoefSeq::from_fn(format!("1/alpha[{}]", s.label), move |k| 1.0 / alpha[k as usize]);
        let c2 = weak_zero_divergence(&c, Exponent::Finite(s.q), s.alpha.len().max(1) as u64)?;
        let pass = c1_constant.is_some() && c2.trend == Trend::DivergingAtHorizon;
        out.push(SampleResult { label: s.label.clone(), c1_constant, c2, pass, note });
    }
    let all = !out.is_empty() && out.iter().all(|r| r.pass);
    let hyper = all && samples_dense && samples.iter().all(|s| s.alpha_is_beta);
    Ok(OrbitCertificate { samples: out, weakly_supercyclic: all, weakly_hypercyclic: hyper })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_has_zero_c() {
        let v: Vec<ZVector> = (0..10).map(ZVector::basis).collect();
        let g = gram_of_zvectors(&v);
        assert_eq!(g.c, 0.0);
        assert_eq!(g.bound, 1.0);
        assert!(g.certified);
    }

    #[test]
    fn repeated_vector_is_not_certified() {
        let v: Vec<ZVector> = (0..200).map(|_| ZVector::basis(0)).collect();
        let g = gram_of_zvectors(&v);
        assert_eq!(g.c, (200 * 199 / 2) as f64);
        assert!(!g.certified);
    }

    #[test]
    fn perturbation_examples() {
        assert_eq!(pseq_perturbation_bound(1.5, &[0.0; 5], Exponent::Finite(2.0), None).unwrap().constant, 1.5);
        let d: Vec<f64> = (0..80).map(|n| 0.5f64.powi(n)).collect();
        let b = pseq_perturbation_bound(1.0, &d, Exponent::Finite(1.0), Some(0.5f64.powi(79))).unwrap();
        assert!((b.constant - 3.0).abs() < 1e-12);
        let ones = vec![1.0; 1000];
        assert!(pseq_perturbation_bound(1.0, &ones, Exponent::Finite(2.0), None).is_none());
    }
}
