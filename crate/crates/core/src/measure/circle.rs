//! Finite measures on the circle made of atoms and constant-density arcs.
//!
//! A point of the circle is written e^{2πit} with t ∈ [0, 1).

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::phase::to_f64;
use super::trig::TrigPoly;
use crate::error::{Error, Result};

/// Mass tolerance for probability measures and bookkeeping checks.
pub const MASS_TOL: f64 = 1e-12;

/// Half-open arc [lo/den, hi/den) with 0 <= lo < hi <= den.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircleArc {
    pub lo: BigInt,
    pub hi: BigInt,
    pub den: BigInt,
}

impl CircleArc {
    pub fn new(lo: BigInt, hi: BigInt, den: BigInt) -> Result<CircleArc> {
        if !den.is_positive() || lo.is_negative() || lo >= hi || hi > den {
            return Err(Error::Domain(format!("bad arc [{lo}, {hi}) / {den}")));
        }
        Ok(CircleArc { lo, hi, den })
    }

    pub fn full() -> CircleArc {
        CircleArc { lo: BigInt::zero(), hi: BigInt::one(), den: BigInt::one() }
    }

    /// The j-th arc [j/n, (j+1)/n), 0-based.
    pub fn uniform(n: &BigInt, j: &BigInt) -> Result<CircleArc> {
        CircleArc::new(j.clone(), j + 1u32, n.clone())
    }

    pub fn start(&self) -> f64 {
        to_f64(&self.lo) / to_f64(&self.den)
    }

    pub fn end(&self) -> f64 {
        to_f64(&self.hi) / to_f64(&self.den)
    }

    pub fn len(&self) -> f64 {
        to_f64(&(&self.hi - &self.lo)) / to_f64(&self.den)
    }

    pub fn is_full(&self) -> bool {
        self.lo.is_zero() && self.hi == self.den
    }

    /// Midpoint as an exact fraction (num, den).
    pub fn midpoint(&self) -> (BigInt, BigInt) {
        (&self.lo + &self.hi, &self.den << 1)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start() <= t && t < self.end()
    }

    /// True when `other` lies inside this arc.
    pub fn covers(&self, other: &CircleArc) -> bool {
        &self.lo * &other.den <= &other.lo * &self.den && &other.hi * &self.den <= &self.hi * &other.den
    }
}

/// The arcs [(k-1)/n, k/n), k = 1..n.
pub fn uniform_partition(n: usize) -> Result<Vec<CircleArc>> {
    if n == 0 {
        return Err(Error::Domain("partition needs n >= 1".into()));
    }
    let den = BigInt::from(n);
    Ok((0..n).map(|j| CircleArc { lo: j.into(), hi: (j + 1).into(), den: den.clone() }).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub height: f64,
}

impl Segment {
    pub fn mass(&self) -> f64 {
        self.height * (self.t1 - self.t0)
    }
}

/// Atoms (t, mass) plus constant-density segments on disjoint arcs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CircleMeasure {
    atoms: Vec<(f64, f64)>,
    segments: Vec<Segment>,
}

impl CircleMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>, mut segments: Vec<Segment>) -> Result<CircleMeasure> {
        for &(t, m) in &atoms {
            if !(0.0..1.0).contains(&t) || !(m > 0.0 && m.is_finite()) {
                return Err(Error::Domain(format!("bad atom ({t}, {m})")));
            }
        }
        for s in &segments {
            if !(0.0 <= s.t0 && s.t0 < s.t1 && s.t1 <= 1.0) || !(s.height >= 0.0 && s.height.is_finite()) {
                return Err(Error::Domain(format!("bad segment {s:?}")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        segments.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        segments.retain(|s| s.height > 0.0);
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Domain(format!("repeated atom at {}", w[0].0)));
            }
        }
        for w in segments.windows(2) {
            if w[1].t0 < w[0].t1 {
                return Err(Error::Domain(format!("segments overlap at {}", w[1].t0)));
            }
        }
        for &(t, _) in &atoms {
            if segments.iter().any(|s| s.t0 < t && t < s.t1) {
                return Err(Error::Domain(format!("atom at {t} inside a segment")));
            }
        }
        Ok(CircleMeasure { atoms, segments })
    }

    pub fn zero() -> CircleMeasure {
        CircleMeasure::default()
    }

    pub fn lebesgue() -> CircleMeasure {
        CircleMeasure { atoms: vec![], segments: vec![Segment { t0: 0.0, t1: 1.0, height: 1.0 }] }
    }

    pub fn dirac(t: f64) -> Result<CircleMeasure> {
        CircleMeasure::new(vec![(t, 1.0)], vec![])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.segments.iter().map(Segment::mass).sum::<f64>()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= MASS_TOL
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms.is_empty()
    }

    /// μ̂(k) = ∫ z^k dμ.
    pub fn fourier(&self, k: i64) -> Complex64 {
        let kf = k as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for &(t, m) in &self.atoms {
            s += Complex64::from_polar(m, 2.0 * PI * (kf * t).fract());
        }
        for seg in &self.segments {
            s += seg.height * segment_fourier(kf, seg.t0, seg.t1);
        }
        s
    }

    /// [μ, f] = Σ_k f̂(k) μ̂(k).
    pub fn pair(&self, f: &TrigPoly) -> Complex64 {
        f.terms().map(|(k, c)| c * self.fourier(k.to_i64().expect("frequency out of range for a float measure"))).sum()
    }

    /// μ(A ∩ [t0, t1)).
    pub fn mass_between(&self, t0: f64, t1: f64) -> f64 {
        let a: f64 = self.atoms.iter().filter(|(t, _)| t0 <= *t && *t < t1).map(|a| a.1).sum();
        let s: f64 = self.segments.iter().map(|s| s.height * (s.t1.min(t1) - s.t0.max(t0)).max(0.0)).sum();
        a + s
    }

    pub fn mass_on(&self, arc: &CircleArc) -> f64 {
        self.mass_between(arc.start(), arc.end())
    }

    /// The restriction to [t0, t1).
    pub fn restrict_between(&self, t0: f64, t1: f64) -> CircleMeasure {
        let atoms = self.atoms.iter().copied().filter(|(t, _)| t0 <= *t && *t < t1).collect();
        let segments = self
            .segments
            .iter()
            .filter_map(|s| {
                let (a, b) = (s.t0.max(t0), s.t1.min(t1));
                (a < b).then_some(Segment { t0: a, t1: b, height: s.height })
            })
            .collect();
        CircleMeasure { atoms, segments }
    }

    pub fn restrict(&self, arc: &CircleArc) -> CircleMeasure {
        self.restrict_between(arc.start(), arc.end())
    }

    /// Σ w_i μ_i for non-negative weights; overlapping densities are added.
    pub fn combine(parts: &[(f64, &CircleMeasure)]) -> Result<CircleMeasure> {
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut cuts: Vec<f64> = Vec::new();
        for (w, m) in parts {
            if *w < 0.0 {
                return Err(Error::Domain("negative weight in combination".into()));
            }
            if *w == 0.0 {
                continue;
            }
            atoms.extend(m.atoms.iter().map(|(t, a)| (*t, a * w)));
            for s in &m.segments {
                cuts.push(s.t0);
                cuts.push(s.t1);
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (t, a) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += a,
                _ => merged.push((t, a)),
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut segments: Vec<Segment> = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let h: f64 = parts.iter().map(|(wt, m)| wt * m.density_at(mid)).sum();
            if h <= 0.0 {
                continue;
            }
            match segments.last_mut() {
                Some(last) if last.t1 == w[0] && last.height == h => last.t1 = w[1],
                _ => segments.push(Segment { t0: w[0], t1: w[1], height: h }),
            }
        }
        CircleMeasure::new(merged, segments)
    }

    /// Density of the absolutely continuous part at t (right-continuous).
    pub fn density_at(&self, t: f64) -> f64 {
        self.segments.iter().find(|s| s.t0 <= t && t < s.t1).map(|s| s.height).unwrap_or(0.0)
    }

    /// Total variation of the density over the circle, counting the jumps at the ends.
    pub fn jump_variation(&self) -> f64 {
        let mut v = 0.0;
        let mut prev_end = None::<(f64, f64)>;
        for s in &self.segments {
            match prev_end {
                Some((t, h)) if t == s.t0 => v += (s.height - h).abs(),
                Some((_, h)) => v += h + s.height,
                None => v += s.height,
            }
            prev_end = Some((s.t1, s.height));
        }
        if let (Some(first), Some((t, h))) = (self.segments.first(), prev_end) {
            // close the loop at t = 0 = 1
            v -= first.height;
            if first.t0 == 0.0 && t == 1.0 {
                v += (first.height - h).abs();
            } else {
                v += first.height + h;
            }
        }
        v
    }
}

/// ∫_{t0}^{t1} e^{2πikt} dt, evaluated as e^{πik(t0+t1)} sin(πk(t1-t0))/(πk).
fn segment_fourier(k: f64, t0: f64, t1: f64) -> Complex64 {
    if k == 0.0 {
        return Complex64::new(t1 - t0, 0.0);
    }
    let phase = 2.0 * PI * (0.5 * k * (t0 + t1)).fract();
    let s = (PI * ((k * (t1 - t0)) % 2.0)).sin() / (PI * k);
    Complex64::from_polar(s, phase)
}

/// Splits an arc into `r` equal sub-arcs.
pub(crate) fn refine(arc: &CircleArc, r: &BigInt) -> Vec<CircleArc> {
    let den = &arc.den * r;
    let lo = &arc.lo * r;
    let hi = &arc.hi * r;
    let mut out = Vec::new();
    let mut x = lo;
    while x < hi {
        let nx = &x + 1u32;
        out.push(CircleArc { lo: x, hi: nx.clone(), den: den.clone() });
        x = nx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebesgue_and_dirac() {
        let l = CircleMeasure::lebesgue();
        assert_eq!(l.fourier(0), Complex64::new(1.0, 0.0));
        for k in [1, -3, 17] {
            assert!(l.fourier(k).norm() < 1e-15);
        }
        let d = CircleMeasure::dirac(0.0).unwrap();
        for k in [-5, 0, 9] {
            assert_eq!(d.fourier(k), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn half_circle_segment() {
        let m = CircleMeasure::new(vec![], vec![Segment { t0: 0.0, t1: 0.5, height: 2.0 }]).unwrap();
        assert!((m.fourier(1).norm() - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let half = CircleMeasure::combine(&[(0.5, &CircleMeasure::dirac(0.0).unwrap()), (0.5, &CircleMeasure::lebesgue())]).unwrap();
        let z = TrigPoly::monomial(BigInt::one(), Complex64::new(1.0, 0.0));
        assert!((half.pair(&z) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((half.pair(&TrigPoly::constant(Complex64::new(1.0, 0.0))).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn restriction_masses() {
        let l = CircleMeasure::lebesgue();
        assert!((l.restrict_between(0.0, 0.5).total_mass() - 0.5).abs() < 1e-15);
        let d = CircleMeasure::dirac(0.25).unwrap();
        assert_eq!(d.restrict_between(0.0, 0.5).total_mass(), 1.0);
        assert_eq!(d.restrict_between(0.5, 1.0).total_mass(), 0.0);
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(CircleMeasure::new(vec![(0.5, 1.0)], vec![Segment { t0: 0.0, t1: 1.0, height: 1.0 }]).is_err());
        assert!(CircleMeasure::new(vec![], vec![Segment { t0: 0.0, t1: 0.6, height: 1.0 }, Segment { t0: 0.5, t1: 1.0, height: 1.0 }]).is_err());
        assert!(uniform_partition(0).is_err());
    }

    #[test]
    fn jump_variation_examples() {
        assert_eq!(CircleMeasure::lebesgue().jump_variation(), 0.0);
        let m = CircleMeasure::new(vec![], vec![Segment { t0: 0.0, t1: 0.5, height: 2.0 }]).unwrap();
        assert_eq!(m.jump_variation(), 4.0);
        let m = CircleMeasure::new(vec![], vec![Segment { t0: 0.25, t1: 0.5, height: 1.0 }, Segment { t0: 0.5, t1: 0.75, height: 3.0 }]).unwrap();
        assert_eq!(m.jump_variation(), 6.0);
    }
}
