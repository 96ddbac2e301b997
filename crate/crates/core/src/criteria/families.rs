//! Named weight families with closed-form log prefixes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{Idx, LogMag, WeightRule, WeightSequence};

/// `base^e` as an `Idx`, or `None` on overflow.
pub fn ipow(base: Idx, e: u32) -> Option<Idx> {
    base.checked_pow(e)
}

/// The named weight sequences.
#[derive(Clone, Debug)]
pub enum WeightFamily {
    /// w ≡ 1.
    Unweighted,
    /// w_n = 2 for n >= 0, w_n = 1 for n < 0.
    ChanSanders,
    /// Bands of 2 and 1/2 around powers of 9; values in {1/2, 1, 2}.
    NineAdic,
    /// w̃_n = 1 / w_{-n} for the nine-adic w.
    NineAdicInverse,
    /// Symmetric weights built from φ(t) = (t+1)^{1/p} (log₂(t+2))^{2/p}; needs p > 2.
    Triadic { p: f64 },
    Custom(WeightSequence),
}

impl WeightFamily {
    pub fn parse(name: &str, p: Option<f64>) -> Result<WeightFamily> {
        match name {
            "unweighted" => Ok(WeightFamily::Unweighted),
            "chan-sanders" | "chan_sanders" => Ok(WeightFamily::ChanSanders),
            "nine-adic" => Ok(WeightFamily::NineAdic),
            "nine-adic-inverse" => Ok(WeightFamily::NineAdicInverse),
            "triadic" => {
                let p = p.ok_or_else(|| Error::Domain("the triadic family needs p".into()))?;
                Ok(WeightFamily::Triadic { p })
            }
            other => Err(Error::Domain(format!("unknown weight family '{other}'"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            WeightFamily::Unweighted => "unweighted".into(),
            WeightFamily::ChanSanders => "chan-sanders".into(),
            WeightFamily::NineAdic => "nine-adic".into(),
            WeightFamily::NineAdicInverse => "nine-adic-inverse".into(),
            WeightFamily::Triadic { p } => format!("triadic(p={p})"),
            WeightFamily::Custom(w) => w.name().unwrap_or("custom").to_string(),
        }
    }

    pub fn sequence(&self) -> Result<WeightSequence> {
        let w = match self {
            WeightFamily::Unweighted => WeightSequence::constant(1.0)?,
            WeightFamily::ChanSanders => WeightSequence::new(Arc::new(ChanSanders), LogMag(0.0), LogMag(1.0))?,
            WeightFamily::NineAdic => WeightSequence::new(Arc::new(NineAdic), LogMag(-1.0), LogMag(1.0))?,
            WeightFamily::NineAdicInverse => {
                WeightSequence::new(Arc::new(NineAdicInverse), LogMag(-1.0), LogMag(1.0))?
            }
            WeightFamily::Triadic { p } => {
                let rule = Triadic::new(*p)?;
                let (lo, hi) = rule.bounds();
                WeightSequence::new(Arc::new(rule), LogMag(lo), LogMag(hi))?.with_symmetry(true)
            }
            WeightFamily::Custom(w) => return Ok(w.clone()),
        };
        Ok(w.with_name(self.name()))
    }
}

struct ChanSanders;

impl WeightRule for ChanSanders {
    fn log_weight(&self, n: Idx) -> f64 {
        if n >= 0 {
            1.0
        } else {
            0.0
        }
    }

    fn log_prefix(&self, n: Idx) -> Option<f64> {
        // P(n) = n for n >= 0; P(-1) = -log w_0 = -1 and nothing changes further left
        Some(if n >= 0 { n as f64 } else { -1.0 })
    }
}

/// Nine-adic bands. For even k: 2 on (7·9^k, 9^{k+1}], 1/2 on (9^{k+1}, 11·9^k].
/// For odd k: 2 on [-11·9^k, -9^{k+1}), 1/2 on [-9^{k+1}, -7·9^k).
pub(crate) struct NineAdic;

/// Number of integers in [lo, hi] ∩ [a, b].
fn overlap(lo: Idx, hi: Idx, a: Idx, b: Idx) -> Idx {
    let l = lo.max(a);
    let h = hi.min(b);
    if h >= l {
        h - l + 1
    } else {
        0
    }
}

/// Calls `f(k, 9^k)` for every k with 7·9^k < bound, stopping at overflow.
fn for_each_nine_power(bound: Idx, mut f: impl FnMut(u32, Idx)) {
    let mut k = 0u32;
    while let Some(pk) = ipow(9, k) {
        match pk.checked_mul(7) {
            Some(s) if s < bound => f(k, pk),
            _ => break,
        }
        k += 1;
    }
}

impl NineAdic {
    /// log2 w_m as an integer in {-1, 0, 1}.
    fn level(m: Idx) -> i32 {
        let mut out = 0;
        for_each_nine_power(m.abs(), |k, pk| {
            let even = k % 2 == 0;
            let next = pk.saturating_mul(9);
            let far = pk.saturating_mul(11);
            if m > 0 && even {
                if m > 7 * pk && m <= next {
                    out = 1;
                } else if m > next && m <= far {
                    out = -1;
                }
            } else if m < 0 && !even {
                if m >= -far && m < -next {
                    out = 1;
                } else if m >= -next && m < -7 * pk {
                    out = -1;
                }
            }
        });
        out
    }

    /// Σ_{m=1}^{n} log2 w_m for n >= 0, and -Σ_{m=n+1}^{0} log2 w_m for n < 0, exactly.
    fn prefix_int(n: Idx) -> i128 {
        let mut acc: i128 = 0;
        if n >= 0 {
            for_each_nine_power(n, |k, pk| {
                if k % 2 == 0 {
                    let next = pk.saturating_mul(9);
                    let far = pk.saturating_mul(11);
                    acc += overlap(1, n, 7 * pk + 1, next);
                    acc -= overlap(1, n, next.saturating_add(1), far);
                }
            });
        } else {
            for_each_nine_power(n.saturating_neg(), |k, pk| {
                if k % 2 == 1 {
                    let next = pk.saturating_mul(9);
                    let far = pk.saturating_mul(11);
                    let s = overlap(n + 1, 0, -far, -next - 1) - overlap(n + 1, 0, -next, -7 * pk - 1);
                    acc -= s;
                }
            });
        }
        acc
    }
}

impl WeightRule for NineAdic {
    fn log_weight(&self, n: Idx) -> f64 {
        NineAdic::level(n) as f64
    }

    fn log_prefix(&self, n: Idx) -> Option<f64> {
        Some(NineAdic::prefix_int(n) as f64)
    }
}

struct NineAdicInverse;

impl WeightRule for NineAdicInverse {
    fn log_weight(&self, n: Idx) -> f64 {
        -(NineAdic::level(-n) as f64)
    }

    fn log_prefix(&self, n: Idx) -> Option<f64> {
        // P̃(n) = P(-n-1) + log w_0, and w_0 = 1
        Some(NineAdic::prefix_int(-n - 1) as f64)
    }
}

/// Exact log2 β(1, a) for the nine-adic weights, as an integer.
pub fn nine_adic_log_beta(a: Idx, inverse: bool) -> i128 {
    if inverse {
        NineAdic::prefix_int(-a - 1)
    } else {
        NineAdic::prefix_int(a)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Triadic {
    p: f64,
}

/// Highest power of 3 tracked by the triadic rule (3^80 > i128::MAX would overflow).
const TRIADIC_MAX_EXP: u32 = 79;

impl Triadic {
    pub(crate) fn new(p: f64) -> Result<Triadic> {
        if !(p > 2.0) || !p.is_finite() {
            return Err(Error::Domain(format!("the triadic family needs p > 2, got {p}")));
        }
        Ok(Triadic { p })
    }

    /// log2 φ(t).
    pub(crate) fn log_phi(&self, t: f64) -> f64 {
        ((t + 1.0).log2() + 2.0 * (t + 2.0).log2().log2()) / self.p
    }

    /// log2 of the weight on (3^n, 2·3^n].
    fn inner(&self, n: u32) -> f64 {
        (self.log_phi(n as f64 + 1.0) - 2.0 * self.log_phi(n as f64)) * 3f64.powi(-(n as i32))
    }

    /// log2 of the weight on the band (3^N - 3^{k+1}, 3^N - 3^k].
    fn band(&self, k: u32) -> f64 {
        (self.log_phi(k as f64 + 1.0) - self.log_phi(k as f64)) * 3f64.powi(-(k as i32)) / 2.0
    }

    fn bounds(&self) -> (f64, f64) {
        let mut lo = 0f64;
        let mut hi = 0f64;
        for n in 0..=TRIADIC_MAX_EXP {
            for v in [self.inner(n), self.band(n)] {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Largest e with 3^e <= m, for m >= 1.
    fn floor_log3(m: Idx) -> u32 {
        let mut e = 0;
        let mut pw: Idx = 1;
        while let Some(next) = pw.checked_mul(3) {
            if next > m {
                break;
            }
            pw = next;
            e += 1;
        }
        e
    }

    fn log_weight_abs(&self, m: Idx) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let n = Triadic::floor_log3(m);
        let pn = 3i128.pow(n);
        if m == pn {
            return 0.0;
        }
        if m <= 2 * pn {
            return self.inner(n);
        }
        // m in (2·3^n, 3^{n+1}): band k with 3^k <= 3^{n+1} - m < 3^{k+1}
        let k = Triadic::floor_log3(3 * pn - m);
        self.band(k)
    }

    /// Σ_{j=1}^{i} log2 w_j for i >= 0.
    fn prefix_pos(&self, i: Idx) -> f64 {
        if i <= 1 {
            return 0.0;
        }
        // block (3^{N-1}, 3^N] containing i, with product φ(N)/φ(N-1)
        let n_up = {
            let e = Triadic::floor_log3(i);
            if 3i128.pow(e) == i {
                e
            } else {
                e + 1
            }
        };
        let lo = 3i128.pow(n_up - 1);
        let mut acc = self.log_phi((n_up - 1) as f64);
        if i == lo {
            return acc;
        }
        let mid = 2 * lo;
        acc += (i.min(mid) - lo) as f64 * self.inner(n_up - 1);
        if i > mid {
            let top = 3 * lo;
            for k in (0..n_up.saturating_sub(1)).rev() {
                let a = top - 3i128.pow(k + 1) + 1;
                let b = top - 3i128.pow(k);
                let c = overlap(mid + 1, i, a, b);
                if c > 0 {
                    acc += c as f64 * self.band(k);
                }
            }
        }
        acc
    }
}

impl WeightRule for Triadic {
    fn log_weight(&self, n: Idx) -> f64 {
        self.log_weight_abs(n.abs())
    }

    fn log_prefix(&self, n: Idx) -> Option<f64> {
        if n.unsigned_abs() > 3u128.pow(TRIADIC_MAX_EXP) {
            return None;
        }
        // symmetry: P(n) = -Σ_{j=n+1}^{0} log w_j = -P(|n| - 1) for n < 0
        Some(if n >= 0 { self.prefix_pos(n) } else { -self.prefix_pos(-n - 1) })
    }
}
