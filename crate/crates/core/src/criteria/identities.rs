//! Exhaustive checks of the closed-form products for the nine-adic and triadic families.

use crate::criteria::families::{nine_adic_log_beta, Triadic, WeightFamily};
use crate::error::{Error, Result};
use crate::lattice::{Idx, WeightRule};

#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub family: String,
    pub checks: usize,
    /// Largest |computed - closed form| in log2 units.
    pub max_abs_err: f64,
    /// Largest |computed - closed form| / max(1, |closed form|).
    pub max_rel_err: f64,
    /// Every identity also checked against the closed-form prefix of the weight rule.
    pub prefix_agrees: bool,
}

impl IdentityReport {
    fn record(&mut self, got: f64, want: f64) {
        let e = (got - want).abs();
        self.checks += 1;
        self.max_abs_err = self.max_abs_err.max(e);
        self.max_rel_err = self.max_rel_err.max(e / want.abs().max(1.0));
    }
}

/// For the nine-adic family: log2 β(1,a) = a - 7·9^k and β(-a+1, 0) = 1 for 7·9^k < a <= 9^{k+1},
/// k even (odd for the inverse family), k <= k_max.
/// For the triadic family: log β(1, 3^n - 3^k) = log φ(n)/φ(k) and log β(1, 3^n) = log φ(n), 0 <= k < n <= k_max.
pub fn verify_weight_identities(family: &WeightFamily, k_max: u32) -> Result<IdentityReport> {
    match family {
        WeightFamily::NineAdic => Ok(nine_adic(family, false, k_max)),
        WeightFamily::NineAdicInverse => Ok(nine_adic(family, true, k_max)),
        WeightFamily::Triadic { p } => triadic(*p, k_max),
        _ => Err(Error::Domain(format!("no product identity for {}", family.name()))),
    }
}

fn nine_adic(family: &WeightFamily, inverse: bool, k_max: u32) -> IdentityReport {
    let w = family.sequence().expect("nine-adic weights are valid");
    let mut rep = IdentityReport { family: family.name(), prefix_agrees: true, ..Default::default() };
    let parity = if inverse { 1 } else { 0 };
    for k in (0..=k_max).filter(|k| k % 2 == parity) {
        let pk = 9i128.pow(k);
        let (lo, hi) = (7 * pk, 9 * pk);
        // integer running products from the individual weights, left and right of 0
        let mut right: i128 = (1..=lo).map(|j| w.eval(j).0 as i128).sum();
        let mut left: i128 = (-lo + 1..=0).map(|j| w.eval(j).0 as i128).sum();
        for a in lo + 1..=hi {
            right += w.eval(a).0 as i128;
            left += w.eval(-a + 1).0 as i128;
            let want = a - lo;
            rep.record(right as f64, want as f64);
            rep.record(left as f64, 0.0);
            rep.prefix_agrees &= nine_adic_log_beta(a, inverse) == want;
            rep.prefix_agrees &= w.beta(-a + 1, 0).map(|b| b.0 == 0.0).unwrap_or(false);
        }
    }
    rep
}

fn triadic(p: f64, n_max: u32) -> Result<IdentityReport> {
    let rule = Triadic::new(p)?;
    let family = WeightFamily::Triadic { p };
    let w = family.sequence()?;
    let mut rep = IdentityReport { family: family.name(), prefix_agrees: true, ..Default::default() };
    let top = 3i128.pow(n_max);
    // running log2 products β(1, i), summed weight by weight
    let mut run = vec![0f64; top as usize + 1];
    for i in 1..=top {
        run[i as usize] = run[i as usize - 1] + rule.log_weight(i);
    }
    let phi = |t: u32| rule.log_phi(t as f64);
    for n in 1..=n_max {
        let pn = 3i128.pow(n);
        let want = phi(n);
        rep.record(run[pn as usize], want);
        rep.prefix_agrees &= (w.beta(1, pn)?.0 - want).abs() <= 1e-9 * want.abs().max(1.0);
        for k in 0..n {
            let a: Idx = pn - 3i128.pow(k);
            let want = phi(n) - phi(k);
            rep.record(run[a as usize], want);
            rep.prefix_agrees &= (w.beta(1, a)?.0 - want).abs() <= 1e-9 * want.abs().max(1.0);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_adic_even_bands_exact() {
        let rep = verify_weight_identities(&WeightFamily::NineAdic, 2).unwrap();
        assert_eq!(rep.max_abs_err, 0.0);
        assert!(rep.prefix_agrees);
        assert_eq!(rep.checks, 2 * (2 + 2 * 81));
    }

    #[test]
    fn inverse_odd_band_exact() {
        let rep = verify_weight_identities(&WeightFamily::NineAdicInverse, 1).unwrap();
        assert_eq!(rep.max_abs_err, 0.0);
        assert!(rep.prefix_agrees);
    }

    #[test]
    fn triadic_block_products() {
        let rep = verify_weight_identities(&WeightFamily::Triadic { p: 3.0 }, 5).unwrap();
        assert!(rep.max_rel_err < 1e-9, "{rep:?}");
        assert!(rep.prefix_agrees);
    }
}
