//! Partial sums of positive series and the last-decade trend rule.

/// Growth ratio S(h)/S(h/10) at or above which a series counts as diverging.
pub const DIVERGE_RATIO: f64 = 1.05;
/// Relative last-decade increment below which a series counts as converging.
pub const CONVERGE_REL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    DivergingAtHorizon,
    ConvergingAtHorizon,
    Inconclusive,
}

impl Trend {
    pub fn name(self) -> &'static str {
        match self {
            Trend::DivergingAtHorizon => "diverging_at_horizon",
            Trend::ConvergingAtHorizon => "converging_at_horizon",
            Trend::Inconclusive => "inconclusive",
        }
    }
}

/// Partial sums S(N) = Σ_{i<N} terms[i], recorded at powers of ten and at the end.
#[derive(Clone, Debug, Default)]
pub struct PartialSums {
    pub checkpoints: Vec<(u64, f64)>,
    pub total: f64,
}

impl PartialSums {
    /// Sums in index order so the rounding does not depend on how terms were produced.
    pub fn from_terms(terms: &[f64]) -> PartialSums {
        let n = terms.len() as u64;
        let mut checkpoints = Vec::new();
        let mut next = 1u64;
        let mut acc = 0f64;
        for (i, t) in terms.iter().enumerate() {
            acc += *t;
            let count = i as u64 + 1;
            if count == next || count == n || count == n / 10 || count == n / 100 {
                checkpoints.push((count, acc));
                if count == next {
                    next = next.saturating_mul(10);
                }
            }
        }
        checkpoints.dedup_by_key(|c| c.0);
        PartialSums { checkpoints, total: acc }
    }

    pub fn horizon(&self) -> u64 {
        self.checkpoints.last().map(|c| c.0).unwrap_or(0)
    }

    /// S(N) at a recorded checkpoint, or the largest checkpoint below N.
    pub fn at(&self, n: u64) -> f64 {
        self.checkpoints.iter().take_while(|c| c.0 <= n).last().map(|c| c.1).unwrap_or(0.0)
    }

    /// S(h) / S(h / d).
    pub fn ratio(&self, d: u64) -> f64 {
        let h = self.horizon();
        let lo = self.at((h / d).max(1));
        if lo > 0.0 {
            self.total / lo
        } else if self.total > 0.0 {
            f64::INFINITY
        } else {
            1.0
        }
    }

    /// (S(h) - S(h/10)) / S(h).
    pub fn decade_increment(&self) -> f64 {
        let h = self.horizon();
        let lo = self.at((h / 10).max(1));
        if self.total > 0.0 {
            (self.total - lo) / self.total
        } else {
            0.0
        }
    }

    pub fn trend(&self) -> Trend {
        if self.ratio(10) >= DIVERGE_RATIO {
            Trend::DivergingAtHorizon
        } else if self.decade_increment() < CONVERGE_REL {
            Trend::ConvergingAtHorizon
        } else {
            Trend::Inconclusive
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_diverges_and_squares_converge() {
        let h: Vec<f64> = (1..=10_000).map(|n| 1.0 / n as f64).collect();
        assert_eq!(PartialSums::from_terms(&h).trend(), Trend::DivergingAtHorizon);
        let g: Vec<f64> = (0..200).map(|n| 0.5f64.powi(n)).collect();
        let s = PartialSums::from_terms(&g);
        assert_eq!(s.trend(), Trend::ConvergingAtHorizon);
        assert!((s.total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn checkpoints_include_decades() {
        let s = PartialSums::from_terms(&vec![1.0; 1000]);
        let ns: Vec<u64> = s.checkpoints.iter().map(|c| c.0).collect();
        assert_eq!(ns, vec![1, 10, 100, 1000]);
        assert_eq!(s.ratio(10), 10.0);
    }
}
