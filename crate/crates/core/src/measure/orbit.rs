//! Orbits of the multiplication operator M f = z·f on L²(μ), through the Fourier coefficients of μ.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::circle::{CircleArc, CircleMeasure};
use super::layered::LayeredMeasure;
use super::trig::TrigPoly;
use crate::error::{Error, Result};

/// A measure whose coefficients μ̂(k) = ∫ z^k dμ can be evaluated, globally and on an arc.
pub trait FourierMeasure: Sync {
    fn coef(&self, k: &BigInt) -> Complex64;
    fn coef_on(&self, k: &BigInt, arc: &CircleArc) -> Complex64;

    /// [μ, f] = Σ f̂(k) μ̂(k).
    fn pair_with(&self, f: &TrigPoly) -> Complex64 {
        f.terms().map(|(k, c)| c * self.coef(k)).sum()
    }

    fn pair_on(&self, f: &TrigPoly, arc: &CircleArc) -> Complex64 {
        f.terms().map(|(k, c)| c * self.coef_on(k, arc)).sum()
    }
}

impl FourierMeasure for CircleMeasure {
    fn coef(&self, k: &BigInt) -> Complex64 {
        match k.to_i64() {
            Some(k) => self.fourier(k),
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    fn coef_on(&self, k: &BigInt, arc: &CircleArc) -> Complex64 {
        self.restrict(arc).coef(k)
    }
}

impl FourierMeasure for LayeredMeasure {
    fn coef(&self, k: &BigInt) -> Complex64 {
        self.fourier(k)
    }

    fn coef_on(&self, k: &BigInt, arc: &CircleArc) -> Complex64 {
        self.fourier_on_arc(k, arc)
    }
}

/// ⟨M^n f, g⟩ in L²(μ) = Σ f̂(a) conj(ĝ(b)) μ̂(n + a − b).
pub fn orbit_pairing<M: FourierMeasure>(mu: &M, f: &TrigPoly, g: &TrigPoly, n: &BigInt) -> Complex64 {
    let mut terms = Vec::new();
    for (a, fa) in f.terms() {
        for (b, gb) in g.terms() {
            terms.push((n + a - b, fa * gb.conj()));
        }
    }
    terms.par_iter().map(|(l, w)| w * mu.coef(l)).collect::<Vec<_>>().into_iter().sum()
}

/// n ↦ |⟨M^n f, g⟩| / ‖M^n f‖ over the range. M is unitary, so the denominator is ‖f‖_{L²(μ)}.
pub fn multiplication_orbit_ratios<M: FourierMeasure>(
    mu: &M,
    f: &TrigPoly,
    g: &TrigPoly,
    range: RangeInclusive<i64>,
) -> Result<Vec<(i64, f64)>> {
    let norm2 = orbit_pairing(mu, f, f, &BigInt::from(0)).re;
    if !(norm2 > 0.0) {
        return Err(Error::Domain("f vanishes in L²(μ)".into()));
    }
    let norm = norm2.sqrt();
    let ns: Vec<i64> = range.collect();
    Ok(ns.par_iter().map(|&n| (n, orbit_pairing(mu, f, g, &BigInt::from(n)).norm() / norm)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn lebesgue_orbit_of_one() {
        let one = TrigPoly::constant(c(1.0));
        let r = multiplication_orbit_ratios(&CircleMeasure::lebesgue(), &one, &one, -5..=5).unwrap();
        for (n, v) in r {
            assert!((v - if n == 0 { 1.0 } else { 0.0 }).abs() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn orbit_pairing_shifts_the_coefficient() {
        // ⟨M^n z, 1⟩ = μ̂(n+1)
        let mu = CircleMeasure::dirac(0.125).unwrap();
        let z = TrigPoly::monomial(BigInt::from(1), c(1.0));
        let one = TrigPoly::constant(c(1.0));
        for n in -3..4 {
            let got = orbit_pairing(&mu, &z, &one, &BigInt::from(n));
            assert!((got - mu.fourier(n + 1)).norm() < 1e-15);
        }
        let lay = LayeredMeasure::lebesgue(4).unwrap();
        assert!((orbit_pairing(&lay, &z, &z, &BigInt::from(0)) - c(1.0)).norm() < 1e-15);
        assert!(orbit_pairing(&lay, &one, &one, &BigInt::from(3)).norm() < 1e-15);
    }

    #[test]
    fn zero_function_is_rejected() {
        let zero = TrigPoly::zero();
        assert!(multiplication_orbit_ratios(&CircleMeasure::lebesgue(), &zero, &zero, 0..=1).is_err());
    }
}
