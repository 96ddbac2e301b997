//! Tables of |[μⁿ − μᴺ, f]| along a sequence of stage measures, globally and per arc.

use num_complex::Complex64;
use rayon::prelude::*;

use super::circle::CircleArc;
use super::orbit::FourierMeasure;
use super::trig::TrigPoly;

#[derive(Clone, Debug)]
pub struct WeakConvRow {
    pub test: usize,
    /// 1-based stage n.
    pub stage: usize,
    /// |[μⁿ − μᴺ, f]|.
    pub diff: f64,
    /// max over arcs I of |[(μⁿ − μᴺ)|_I, f]|.
    pub restricted: f64,
}

#[derive(Clone, Debug)]
pub struct WeakConvReport {
    pub rows: Vec<WeakConvRow>,
    /// Per test: the global differences never increase with n (up to `slack`).
    pub decreasing: Vec<bool>,
}

impl WeakConvReport {
    pub fn all_decreasing(&self) -> bool {
        self.decreasing.iter().all(|d| *d)
    }
}

/// Compares every stage with the last one on each test function and each arc.
pub fn weak_convergence_check<M: FourierMeasure>(stages: &[M], tests: &[TrigPoly], arcs: &[CircleArc], slack: f64) -> WeakConvReport {
    let Some(last) = stages.last() else {
        return WeakConvReport { rows: Vec::new(), decreasing: vec![true; tests.len()] };
    };
    let final_pairs: Vec<(Complex64, Vec<Complex64>)> =
        tests.par_iter().map(|f| (last.pair_with(f), arcs.iter().map(|a| last.pair_on(f, a)).collect())).collect();
    let jobs: Vec<(usize, usize)> = (0..tests.len()).flat_map(|t| (0..stages.len()).map(move |s| (t, s))).collect();
    let rows: Vec<WeakConvRow> = jobs
        .par_iter()
        .map(|&(t, s)| {
            let f = &tests[t];
            let mu = &stages[s];
            let diff = (mu.pair_with(f) - final_pairs[t].0).norm();
            let restricted = arcs.iter().zip(&final_pairs[t].1).map(|(a, v)| (mu.pair_on(f, a) - v).norm()).fold(0.0, f64::max);
            WeakConvRow { test: t, stage: s + 1, diff, restricted }
        })
        .collect();
    let decreasing = (0..tests.len())
        .map(|t| {
            let d: Vec<f64> = rows.iter().filter(|r| r.test == t).map(|r| r.diff).collect();
            d.windows(2).all(|w| w[1] <= w[0] + slack)
        })
        .collect();
    WeakConvReport { rows, decreasing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::circle::{uniform_partition, CircleMeasure, Segment};
    use crate::measure::discretize::discretize_ac;
    use num_bigint::BigInt;

    #[test]
    fn constant_test_has_no_differences() {
        let stages = vec![CircleMeasure::lebesgue(), CircleMeasure::dirac(0.3).unwrap()];
        let r = weak_convergence_check(&stages, &[TrigPoly::constant(Complex64::new(1.0, 0.0))], &[], 0.0);
        assert!(r.rows.iter().all(|row| row.diff < 1e-15));
        assert!(r.all_decreasing());
    }

    #[test]
    fn dyadic_discretizations_of_a_step_density() {
        let mu = CircleMeasure::new(vec![], vec![Segment { t0: 0.0, t1: 0.3, height: 2.0 }, Segment { t0: 0.3, t1: 1.0, height: 4.0 / 7.0 }])
            .unwrap();
        let stages: Vec<CircleMeasure> =
            (1..=6).map(|e| discretize_ac(&mu, &uniform_partition(1 << e).unwrap()).unwrap()).chain([mu.clone()]).collect();
        let z = TrigPoly::monomial(BigInt::from(1), Complex64::new(1.0, 0.0));
        let arcs = uniform_partition(2).unwrap();
        let r = weak_convergence_check(&stages, &[z.clone()], &arcs, 1e-12);
        for row in &r.rows {
            // matched masses on arcs of width 2^-e, and |z' | = 2π
            let mesh = if row.stage <= 6 { 0.5f64.powi(row.stage as i32) } else { 0.0 };
            assert!(row.diff <= 2.0 * std::f64::consts::PI * mesh + 1e-12, "{row:?}");
            assert!(row.restricted <= 2.0 * std::f64::consts::PI * mesh + 1e-12, "{row:?}");
        }
        assert_eq!(r.rows.last().unwrap().diff, 0.0);
    }
}
