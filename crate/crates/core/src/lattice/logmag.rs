//! Magnitudes stored as base-2 logarithms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Above this many binary orders of magnitude the linear value is never formed.
pub const LINEAR_LIMIT: f64 = 512.0;

/// A positive magnitude `2^value`. Addition multiplies magnitudes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LogMag(pub f64);

impl LogMag {
    /// The magnitude 1.
    pub const UNIT: LogMag = LogMag(0.0);

    pub fn from_linear(x: f64) -> Option<LogMag> {
        (x > 0.0 && x.is_finite()).then(|| LogMag(x.log2()))
    }

    pub fn from_ln(x: f64) -> LogMag {
        LogMag(x / std::f64::consts::LN_2)
    }

    pub fn log2(self) -> f64 {
        self.0
    }

    pub fn ln(self) -> f64 {
        self.0 * std::f64::consts::LN_2
    }

    /// Linear value, refused when it would leave the safe range.
    pub fn to_linear(self) -> Option<f64> {
        (self.0.abs() <= LINEAR_LIMIT).then(|| self.0.exp2())
    }

    /// Linear value with saturation to 0 or infinity; for reporting only.
    pub fn to_linear_saturating(self) -> f64 {
        self.0.exp2()
    }

    pub fn inv(self) -> LogMag {
        LogMag(-self.0)
    }

    pub fn pow(self, e: f64) -> LogMag {
        LogMag(self.0 * e)
    }

    pub fn max(self, other: LogMag) -> LogMag {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: LogMag) -> LogMag {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    /// log2 of a sum of magnitudes, without leaving log space.
    pub fn sum<I: IntoIterator<Item = LogMag>>(items: I) -> Option<LogMag> {
        let v: Vec<f64> = items.into_iter().map(|m| m.0).collect();
        let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return None;
        }
        let s: f64 = v.iter().map(|x| (x - top).exp2()).sum();
        Some(LogMag(top + s.log2()))
    }

    pub fn total_cmp(&self, other: &LogMag) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for LogMag {
    type Output = LogMag;
    fn add(self, rhs: LogMag) -> LogMag {
        LogMag(self.0 + rhs.0)
    }
}

impl AddAssign for LogMag {
    fn add_assign(&mut self, rhs: LogMag) {
        self.0 += rhs.0;
    }
}

impl Sub for LogMag {
    type Output = LogMag;
    fn sub(self, rhs: LogMag) -> LogMag {
        LogMag(self.0 - rhs.0)
    }
}

impl SubAssign for LogMag {
    fn sub_assign(&mut self, rhs: LogMag) {
        self.0 -= rhs.0;
    }
}

impl Neg for LogMag {
    type Output = LogMag;
    fn neg(self) -> LogMag {
        LogMag(-self.0)
    }
}

impl Mul<f64> for LogMag {
    type Output = LogMag;
    fn mul(self, e: f64) -> LogMag {
        LogMag(self.0 * e)
    }
}

impl PartialOrd for LogMag {
    fn partial_cmp(&self, other: &LogMag) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for LogMag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{:.6}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_is_addition() {
        let a = LogMag::from_linear(8.0).unwrap();
        let b = LogMag::from_linear(0.25).unwrap();
        assert_eq!((a + b).to_linear(), Some(2.0));
    }

    #[test]
    fn refuses_huge_linear() {
        assert!(LogMag(600.0).to_linear().is_none());
        assert!(LogMag(-600.0).to_linear().is_none());
        assert_eq!(LogMag(3.0).to_linear(), Some(8.0));
    }

    #[test]
    fn sum_in_log_space() {
        let s = LogMag::sum([LogMag(1000.0), LogMag(1000.0)]).unwrap();
        assert!((s.0 - 1001.0).abs() < 1e-12);
        assert!(LogMag::sum(std::iter::empty()).is_none());
    }
}
