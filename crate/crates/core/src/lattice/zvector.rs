//! Finitely supported vectors on Z with entries kept as (magnitude, phase).

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::logmag::LogMag;
use super::weights::{Idx, WeightSequence};

/// One coordinate: `2^mag.0 * phase`, with `|phase| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub mag: LogMag,
    pub phase: Complex64,
}

impl Entry {
    pub fn from_complex(z: Complex64) -> Option<Entry> {
        let r = z.norm();
        LogMag::from_linear(r).map(|mag| Entry { mag, phase: z / r })
    }

    /// Linear value when it is in range.
    pub fn value(&self) -> Option<Complex64> {
        self.mag.to_linear().map(|r| self.phase * r)
    }
}

/// Exponent of an ℓp norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PExp {
    Finite(f64),
    Infinity,
}

/// A finitely supported vector on Z. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZVector {
    entries: BTreeMap<Idx, Entry>,
}

impl ZVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector e_n.
    pub fn basis(n: Idx) -> Self {
        let mut v = Self::zero();
        v.entries.insert(n, Entry { mag: LogMag::UNIT, phase: Complex64::new(1.0, 0.0) });
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (Idx, Complex64)>>(pairs: I) -> Self {
        let mut v = Self::zero();
        for (n, z) in pairs {
            v.set(n, z);
        }
        v
    }

    /// Sets coordinate n; a zero value removes it.
    pub fn set(&mut self, n: Idx, z: Complex64) {
        match Entry::from_complex(z) {
            Some(e) => {
                self.entries.insert(n, e);
            }
            None => {
                self.entries.remove(&n);
            }
        }
    }

    pub fn set_entry(&mut self, n: Idx, e: Entry) {
        self.entries.insert(n, e);
    }

    pub fn get(&self, n: Idx) -> Option<&Entry> {
        self.entries.get(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Idx, &Entry)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = Idx> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// γ(x) = max |n| over the support; 0 for the zero vector.
    pub fn gamma(&self) -> Idx {
        let lo = self.entries.keys().next().map(|k| k.abs()).unwrap_or(0);
        let hi = self.entries.keys().next_back().map(|k| k.abs()).unwrap_or(0);
        lo.max(hi)
    }

    /// Multiplies every entry by a positive scalar.
    pub fn scale(&self, s: LogMag) -> ZVector {
        ZVector {
            entries: self.entries.iter().map(|(k, e)| (*k, Entry { mag: e.mag + s, phase: e.phase })).collect(),
        }
    }

    /// Translates the support: coordinate n moves to n + d.
    pub fn translate(&self, d: Idx) -> ZVector {
        ZVector { entries: self.entries.iter().map(|(k, e)| (k + d, *e)).collect() }
    }

    /// Union of two vectors with disjoint supports; `None` if they overlap.
    pub fn disjoint_union(&self, other: &ZVector) -> Option<ZVector> {
        let mut out = self.clone();
        for (k, e) in other.entries.iter() {
            if out.entries.insert(*k, *e).is_some() {
                return None;
            }
        }
        Some(out)
    }

    pub fn supports_disjoint(&self, other: &ZVector) -> bool {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.entries.keys().all(|k| !big.entries.contains_key(k))
    }
}

/// Tⁿx for the bilateral shift T e_m = w_m e_{m-1}; negative n applies the inverse.
pub fn apply_shift(w: &WeightSequence, x: &ZVector, n: Idx) -> ZVector {
    let mut out = ZVector::zero();
    for (m, e) in x.iter() {
        // Tⁿ e_m = β(m-n+1, m) e_{m-n} for n >= 1, T^{-n} e_m = e_{m+n} / β(m+1, m+n)
        let factor = if n > 0 {
            w.beta_or_unit(m - n + 1, m)
        } else if n < 0 {
            w.beta_or_unit(m + 1, m - n).inv()
        } else {
            LogMag::UNIT
        };
        out.entries.insert(m - n, Entry { mag: e.mag + factor, phase: e.phase });
    }
    out
}

/// ‖x‖_p in log form; `None` for the zero vector.
pub fn pnorm(x: &ZVector, p: PExp) -> Option<LogMag> {
    match p {
        PExp::Infinity => x.entries.values().map(|e| e.mag).reduce(LogMag::max),
        PExp::Finite(p) => {
            assert!(p >= 1.0, "pnorm needs p >= 1");
            LogMag::sum(x.entries.values().map(|e| e.mag * p)).map(|s| s * (1.0 / p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_norms() {
        let e0 = ZVector::basis(0);
        assert_eq!(pnorm(&e0, PExp::Finite(3.0)), Some(LogMag::UNIT));
        let v = ZVector::from_pairs([(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))]);
        assert!((pnorm(&v, PExp::Finite(2.0)).unwrap().to_linear().unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let v = ZVector::from_pairs([(0, Complex64::new(3.0, 0.0)), (1, Complex64::new(4.0, 0.0))]);
        assert!((pnorm(&v, PExp::Infinity).unwrap().to_linear().unwrap() - 4.0).abs() < 1e-15);
        assert!(pnorm(&ZVector::zero(), PExp::Finite(2.0)).is_none());
    }

    #[test]
    fn setting_zero_removes() {
        let mut v = ZVector::basis(4);
        v.set(4, Complex64::new(0.0, 0.0));
        assert!(v.is_empty());
        assert_eq!(v.gamma(), 0);
    }

    #[test]
    fn shift_of_basis_vector() {
        let w = WeightSequence::constant(1.0).unwrap();
        let y = apply_shift(&w, &ZVector::basis(0), 7);
        assert_eq!(y.support().collect::<Vec<_>>(), vec![-7]);
        assert_eq!(y.get(-7).unwrap().mag, LogMag::UNIT);
    }
}
