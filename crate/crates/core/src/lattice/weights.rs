//! Weight sequences indexed by Z and the product β(a,b) = |w_a|⋯|w_b|.

use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;

use super::logmag::LogMag;
use crate::error::{Error, Result};

/// Integer index on Z. Wide enough for the 9^(2n+1) style horizons.
pub type Idx = i128;

/// A rule giving log2 |w_n| for every integer n.
pub trait WeightRule: Send + Sync {
    fn log_weight(&self, n: Idx) -> f64;

    /// Closed form of `P(n)`, where `P(n) - P(m) = Σ_{j=m+1}^{n} log2 |w_j|` and `P(0) = 0`.
    /// Rules without one get a memoized table.
    fn log_prefix(&self, _n: Idx) -> Option<f64> {
        None
    }
}

impl<F> WeightRule for F
where
    F: Fn(Idx) -> f64 + Send + Sync,
{
    fn log_weight(&self, n: Idx) -> f64 {
        self(n)
    }
}

/// Largest half-width of the memo table before falling back to direct sums.
const WINDOW_CAP: usize = 1 << 24;

#[derive(Default)]
struct PrefixWindow {
    // pos[i] = P(i) for 0 <= i < pos.len(); neg[i] = P(-i) for 0 <= i < neg.len()
    pos: Vec<f64>,
    neg: Vec<f64>,
}

/// A weight sequence with declared bounds `lower <= |w_n| <= upper`.
#[derive(Clone)]
pub struct WeightSequence {
    rule: Arc<dyn WeightRule>,
    lower: LogMag,
    upper: LogMag,
    name: Option<String>,
    symmetric: bool,
    window: Arc<RwLock<PrefixWindow>>,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

impl WeightSequence {
    pub fn new(rule: Arc<dyn WeightRule>, lower: LogMag, upper: LogMag) -> Result<Self> {
        if lower > upper || !lower.0.is_finite() || !upper.0.is_finite() {
            return Err(Error::Domain(format!("bad weight bounds [{lower}, {upper}]")));
        }
        Ok(WeightSequence {
            rule,
            lower,
            upper,
            name: None,
            symmetric: false,
            window: Arc::new(RwLock::new(PrefixWindow::default())),
        })
    }

    pub fn from_fn<F>(f: F, lower: LogMag, upper: LogMag) -> Result<Self>
    where
        F: Fn(Idx) -> f64 + Send + Sync + 'static,
    {
        Self::new(Arc::new(f), lower, upper)
    }

    pub fn constant(c: f64) -> Result<Self> {
        let l = LogMag::from_linear(c).ok_or_else(|| Error::Domain("weight must be positive".into()))?;
        let lw = l.0;
        Ok(Self::from_fn(move |_| lw, l, l)?.with_symmetry(true))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Declares `w_n = w_{-n}`. Verdict code relies on this, so only set it when it is true.
    pub fn with_symmetry(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn lower_bound(&self) -> LogMag {
        self.lower
    }

    pub fn upper_bound(&self) -> LogMag {
        self.upper
    }

    /// The constant c with c^-1 <= |w_n| <= c.
    pub fn two_sided_constant(&self) -> LogMag {
        LogMag(self.upper.0.max(-self.lower.0).max(0.0))
    }

    /// True when every weight has magnitude exactly 1.
    pub fn is_unit(&self) -> bool {
        self.lower.0 == 0.0 && self.upper.0 == 0.0
    }

    pub fn eval(&self, n: Idx) -> LogMag {
        LogMag(self.rule.log_weight(n))
    }

    /// Checks the declared bounds at `n`.
    pub fn check_bounds(&self, n: Idx) -> Result<LogMag> {
        let v = self.eval(n);
        if !v.0.is_finite() || v < self.lower || v > self.upper {
            return Err(Error::Domain(format!("weight at {n} is {v}, outside declared bounds")));
        }
        Ok(v)
    }

    /// β(a,b) = Π_{j=a}^{b} |w_j| in log2 form.
    pub fn beta(&self, a: Idx, b: Idx) -> Result<LogMag> {
        if a > b {
            return Err(Error::Domain(format!("beta({a},{b}) needs a <= b")));
        }
        if self.is_unit() {
            return Ok(LogMag::UNIT);
        }
        Ok(LogMag(self.prefix(b) - self.prefix(a - 1)))
    }

    /// β without the a <= b check; the empty product (b = a - 1) is 1.
    pub fn beta_or_unit(&self, a: Idx, b: Idx) -> LogMag {
        if b < a || self.is_unit() {
            LogMag::UNIT
        } else {
            LogMag(self.prefix(b) - self.prefix(a - 1))
        }
    }

    fn prefix(&self, n: Idx) -> f64 {
        if let Some(v) = self.rule.log_prefix(n) {
            return v;
        }
        let mag = n.unsigned_abs();
        if mag >= WINDOW_CAP as u128 {
            return self.direct_prefix(n);
        }
        let i = mag as usize;
        {
            let w = self.window.read();
            let table = if n >= 0 { &w.pos } else { &w.neg };
            if i < table.len() {
                return table[i];
            }
        }
        let mut w = self.window.write();
        let target = (i + 1).next_power_of_two().min(WINDOW_CAP);
        if n >= 0 {
            if w.pos.is_empty() {
                w.pos.push(0.0);
            }
            while w.pos.len() < target {
                let j = w.pos.len();
                let next = w.pos[j - 1] + self.rule.log_weight(j as Idx);
                w.pos.push(next);
            }
            w.pos[i]
        } else {
            if w.neg.is_empty() {
                w.neg.push(0.0);
            }
            while w.neg.len() < target {
                // P(-j) = P(-j+1) - log w_{-j+1}
                let j = w.neg.len();
                let next = w.neg[j - 1] - self.rule.log_weight(-(j as Idx) + 1);
                w.neg.push(next);
            }
            w.neg[i]
        }
    }

    fn direct_prefix(&self, n: Idx) -> f64 {
        if n >= 0 {
            (1..=n).map(|j| self.rule.log_weight(j)).sum()
        } else {
            -(n + 1..=0).map(|j| self.rule.log_weight(j)).sum::<f64>()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_weights_give_unit_products() {
        let w = WeightSequence::constant(1.0).unwrap();
        assert_eq!(w.beta(-5, 17).unwrap(), LogMag::UNIT);
    }

    #[test]
    fn reversed_range_is_an_error() {
        let w = WeightSequence::constant(2.0).unwrap();
        assert!(w.beta(3, 2).is_err());
    }

    #[test]
    fn table_matches_direct_sum() {
        let w = WeightSequence::from_fn(|n| ((n as f64) * 0.37).sin() * 0.5, LogMag(-0.5), LogMag(0.5)).unwrap();
        for (a, b) in [(-40, 7), (-3, -1), (0, 0), (5, 90), (-100, 100)] {
            let direct: f64 = (a..=b).map(|j| ((j as f64) * 0.37).sin() * 0.5).sum();
            assert!((w.beta(a, b).unwrap().0 - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrent_reads_agree() {
        let w = WeightSequence::from_fn(|n| if n % 3 == 0 { 1.0 } else { -0.25 }, LogMag(-0.25), LogMag(1.0)).unwrap();
        let expected = w.clone().beta(-500, 900).unwrap();
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| assert_eq!(w.beta(-500, 900).unwrap(), expected));
            }
        });
    }
}
