//! Step and atomic approximations of a measure that keep the mass of every arc of a partition.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::circle::{CircleArc, CircleMeasure, Segment};
use super::phase::turns;
use crate::error::{Error, Result};

/// The point anchor + 2^{-eps_exp}·√prime of the circle, with a rational anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependentPoint {
    pub anchor_num: BigInt,
    pub anchor_den: BigInt,
    pub eps_exp: u32,
    pub prime: u64,
}

impl IndependentPoint {
    pub fn angle(&self) -> f64 {
        let t = turns(&self.anchor_num, &self.anchor_den) + (self.prime as f64).sqrt() * 0.5f64.powi(self.eps_exp as i32);
        t.fract()
    }
}

pub(crate) fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|p| *p * *p <= c).all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// One point strictly inside each arc; distinct primes make the set independent.
pub fn independent_points(arcs: &[CircleArc]) -> Result<Vec<IndependentPoint>> {
    if arcs.is_empty() {
        return Err(Error::Domain("independent_points needs at least one arc".into()));
    }
    let primes = first_primes(arcs.len());
    let half = arcs.iter().map(|a| a.len() * 0.5).fold(f64::INFINITY, f64::min);
    if !(half > 0.0) {
        return Err(Error::Domain("degenerate arc".into()));
    }
    let root = (*primes.last().unwrap() as f64).sqrt();
    // 2^{-e}·√p_max < half the shortest arc, with a factor 2 to spare
    let mut e = ((root / half).log2().ceil().max(0.0)) as u32 + 1;
    loop {
        let pts: Vec<IndependentPoint> = arcs
            .iter()
            .zip(&primes)
            .map(|(a, &p)| {
                let (num, den) = a.midpoint();
                IndependentPoint { anchor_num: num, anchor_den: den, eps_exp: e, prime: p }
            })
            .collect();
        if pts.iter().zip(arcs).all(|(p, a)| {
            let t = p.angle();
            a.start() < t && t < a.end()
        }) {
            return Ok(pts);
        }
        e += 1;
        if e > 1000 {
            return Err(Error::Domain("arc too short for a floating point location".into()));
        }
    }
}

/// The decision rule behind independence: one shared ε > 0 and pairwise distinct primes.
pub fn independence_rule_holds(points: &[IndependentPoint]) -> bool {
    let Some(first) = points.first() else { return true };
    let mut seen = std::collections::BTreeSet::new();
    points.iter().all(|p| {
        p.eps_exp == first.eps_exp && is_prime(p.prime) && seen.insert(p.prime)
    })
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Coefficients of √p in Σ n_j t_j. A nonzero map means the combination is irrational.
pub fn irrational_part(points: &[IndependentPoint], n: &[i64]) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    for (p, &k) in points.iter().zip(n) {
        *out.entry(p.prime).or_insert(0) += k;
    }
    out.retain(|_, v| *v != 0);
    out
}

/// The step measure with μ_n(I) = μ(I) on every arc of the partition.
pub fn discretize_ac(mu: &CircleMeasure, partition: &[CircleArc]) -> Result<CircleMeasure> {
    let segments = partition
        .iter()
        .map(|a| Segment { t0: a.start(), t1: a.end(), height: mu.mass_on(a) / a.len() })
        .collect();
    CircleMeasure::new(vec![], segments)
}

#[derive(Clone, Debug)]
pub struct AtomicDiscretization {
    pub measure: CircleMeasure,
    pub points: Vec<IndependentPoint>,
}

/// Σ_j μ(I_j) δ_{z_j} with z_j independent and inside I_j.
pub fn discretize_atomic(mu: &CircleMeasure, partition: &[CircleArc]) -> Result<AtomicDiscretization> {
    let points = independent_points(partition)?;
    let atoms = points
        .iter()
        .zip(partition)
        .map(|(p, a)| (p.angle(), mu.mass_on(a)))
        .filter(|a| a.1 > 0.0)
        .collect();
    Ok(AtomicDiscretization { measure: CircleMeasure::new(atoms, vec![])?, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::circle::uniform_partition;

    #[test]
    fn single_arc_point() {
        let pts = independent_points(&[CircleArc::full()]).unwrap();
        assert_eq!(pts[0].prime, 2);
        let t = pts[0].angle();
        assert!(0.0 < t && t < 1.0);
        assert!(independence_rule_holds(&pts));
    }

    #[test]
    fn two_arcs_use_two_primes() {
        let arcs = uniform_partition(2).unwrap();
        let pts = independent_points(&arcs).unwrap();
        assert_eq!((pts[0].prime, pts[1].prime), (2, 3));
        for n in [[1, 0], [0, -2], [3, 5], [-1, 1]] {
            assert!(!irrational_part(&pts, &n).is_empty());
        }
        assert!(irrational_part(&pts, &[0, 0]).is_empty());
    }

    #[test]
    fn lebesgue_is_its_own_step_measure() {
        let arcs = uniform_partition(8).unwrap();
        let m = discretize_ac(&CircleMeasure::lebesgue(), &arcs).unwrap();
        for a in &arcs {
            assert!((m.mass_on(a) - 0.125).abs() < 1e-15);
            assert!((m.density_at(a.start()) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn atomic_keeps_arc_masses() {
        let mu = CircleMeasure::new(vec![(0.1, 0.25)], vec![Segment { t0: 0.3, t1: 0.9, height: 1.25 }]).unwrap();
        let arcs = uniform_partition(5).unwrap();
        let d = discretize_atomic(&mu, &arcs).unwrap();
        for a in &arcs {
            assert!((d.measure.mass_on(a) - mu.mass_on(a)).abs() < 1e-15);
        }
        let ac = discretize_ac(&mu, &arcs).unwrap();
        for a in &arcs {
            assert!((ac.mass_on(a) - mu.mass_on(a)).abs() < 1e-15);
        }
    }
}
