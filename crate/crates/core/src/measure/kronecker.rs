//! Simultaneous approximation: the first k with k·t_s close to θ_s modulo 1 for every s.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Distance from x to the nearest integer.
pub fn circle_dist(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

/// max_s ‖k t_s − θ_s‖_{R/Z}, in turns.
pub fn defect(points: &[f64], targets: &[f64], k: u64) -> f64 {
    points.iter().zip(targets).map(|(t, th)| circle_dist((k as f64 * t).fract() - th)).fold(0.0, f64::max)
}

/// Smallest k in (k0, kmax] whose defect is below `tol` (angles and tolerance in turns).
pub fn kronecker_search(points: &[f64], targets: &[f64], k0: u64, tol: f64, kmax: u64) -> Result<u64> {
    if points.is_empty() {
        return Err(Error::Domain("kronecker_search needs at least one point".into()));
    }
    if points.len() != targets.len() {
        return Err(Error::Domain("one target per point".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    if k0 >= kmax {
        return Err(Error::SearchExhausted { kmax, best_k: k0, defect: f64::INFINITY });
    }
    let found = (k0 + 1..=kmax).into_par_iter().find_first(|&k| defect(points, targets, k) < tol);
    match found {
        Some(k) => {
            let d = defect(points, targets, k);
            if d >= tol {
                return Err(Error::CheckFailed { stage: 0, what: format!("k = {k} failed its re-check ({d})") });
            }
            Ok(k)
        }
        None => {
            let (best_k, d) = (k0 + 1..=kmax)
                .into_par_iter()
                .map(|k| (k, defect(points, targets, k)))
                .reduce(|| (0, f64::INFINITY), |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
            Err(Error::SearchExhausted { kmax, best_k, defect: d })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_itself_is_hit_at_one() {
        let t = 0.123456;
        assert_eq!(kronecker_search(&[t], &[t], 0, 1e-9, 10).unwrap(), 1);
    }

    #[test]
    fn sqrt_two_needs_seventy() {
        let t = 2f64.sqrt().fract();
        assert_eq!(kronecker_search(&[t], &[0.0], 0, 0.01, 1000).unwrap(), 70);
    }

    #[test]
    fn empty_and_exhausted() {
        assert!(kronecker_search(&[], &[], 0, 0.1, 10).is_err());
        match kronecker_search(&[2f64.sqrt().fract()], &[0.0], 0, 1e-4, 60) {
            Err(Error::SearchExhausted { best_k, .. }) => assert_eq!(best_k, 29),
            other => panic!("{other:?}"),
        }
    }
}
