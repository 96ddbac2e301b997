//! Trigonometric polynomials Σ c_f z^f with integer (possibly huge) frequencies.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::phase::{cis, to_f64};

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    coeffs: BTreeMap<BigInt, Complex64>,
    /// Upper bound on the sup norm over the circle; never below the true sup norm.
    sup_bound: f64,
}

impl Default for TrigPoly {
    fn default() -> Self {
        TrigPoly::zero()
    }
}

impl TrigPoly {
    pub fn zero() -> TrigPoly {
        TrigPoly { coeffs: BTreeMap::new(), sup_bound: 0.0 }
    }

    pub fn constant(c: Complex64) -> TrigPoly {
        TrigPoly::monomial(BigInt::zero(), c)
    }

    /// c·z^k.
    pub fn monomial(k: BigInt, c: Complex64) -> TrigPoly {
        let mut p = TrigPoly::zero();
        p.insert(k, c);
        p.sup_bound = c.norm();
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (BigInt, Complex64)>>(terms: I) -> TrigPoly {
        let mut p = TrigPoly::zero();
        for (k, c) in terms {
            p.insert(k, c);
        }
        p.sup_bound = p.l1();
        p
    }

    fn insert(&mut self, k: BigInt, c: Complex64) {
        let e = self.coeffs.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&k);
        }
    }

    /// Replaces the stored sup-norm bound by a tighter one the caller knows to hold.
    pub fn with_sup_bound(mut self, bound: f64) -> TrigPoly {
        assert!(bound >= 0.0 && bound <= self.l1() * (1.0 + 1e-12), "bound must lie under Σ|c|");
        self.sup_bound = bound;
        self
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// Σ |c_f|.
    pub fn l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn coeff(&self, k: &BigInt) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> BigInt {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or_default()
    }

    /// Bound on |d/dt p(e^{2πit})|: 2π Σ |f||c_f|.
    pub fn lipschitz(&self) -> f64 {
        2.0 * PI * self.coeffs.iter().map(|(k, c)| to_f64(&k.abs()) * c.norm()).sum::<f64>()
    }

    pub fn scale(&self, s: Complex64) -> TrigPoly {
        let mut p = TrigPoly::zero();
        for (k, c) in &self.coeffs {
            p.insert(k.clone(), c * s);
        }
        p.sup_bound = self.sup_bound * s.norm();
        p
    }

    /// The complex conjugate function: Σ conj(c_f) z^{-f}.
    pub fn conj(&self) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (-k, c.conj())).collect(),
            sup_bound: self.sup_bound,
        }
    }

    /// Value at the point e^{2πi·num/den} of the circle.
    pub fn eval_rational(&self, num: &BigInt, den: &BigInt) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c * cis(&(k * num), den)).sum()
    }

    /// Value at e^{2πit}; for moderate degrees only.
    pub fn eval_turns(&self, t: f64) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c * Complex64::from_polar(1.0, 2.0 * PI * (to_f64(k) * t).fract())).sum()
    }

    /// Upper bound on the sup norm from n samples: max sample + Lipschitz · half spacing.
    pub fn sampled_sup_bound(&self, n: usize) -> f64 {
        let n = n.max(1);
        let top = (0..n).map(|i| self.eval_turns(i as f64 / n as f64).norm()).fold(0.0, f64::max);
        (top + self.lipschitz() / (2.0 * n as f64)).min(self.l1())
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut p = self.clone();
        for (k, c) in &rhs.coeffs {
            p.insert(k.clone(), *c);
        }
        p.sup_bound = (self.sup_bound + rhs.sup_bound).min(p.l1());
        p
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let mut p = TrigPoly::zero();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &rhs.coeffs {
                p.insert(a + b, ca * cb);
            }
        }
        p.sup_bound = (self.sup_bound * rhs.sup_bound).min(p.l1());
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_conjugate() {
        let z = TrigPoly::monomial(BigInt::from(1), c(1.0, 0.0));
        let p = &z * &z.conj();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&BigInt::zero()), c(1.0, 0.0));
        assert_eq!(p.sup_bound(), 1.0);
    }

    #[test]
    fn evaluation_and_bounds() {
        let h = TrigPoly::from_terms([(BigInt::from(0), c(0.5, 0.0)), (BigInt::from(1), c(0.5, 0.0))]);
        assert!((h.eval_turns(0.0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(h.eval_turns(0.5).norm() < 1e-15);
        assert!((h.lipschitz() - PI).abs() < 1e-15);
        let s = h.sampled_sup_bound(1000);
        assert!((1.0..=1.0 + 2e-3).contains(&s));
        let big = BigInt::from(10u32).pow(30);
        let m = TrigPoly::monomial(big.clone(), c(1.0, 0.0));
        // z^{10^30} at the point 10^-30/4 + 1/2 is i·(-1)^{10^30} = i
        let v = m.eval_rational(&(&big * 2 + 1), &(&big * 4));
        assert!((v - c(0.0, 1.0)).norm() < 1e-12);
    }
}
