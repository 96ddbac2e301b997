//! The map κ: Z≥0 → finitely supported vectors, constant on disjoint arithmetic progressions.

use num_complex::Complex64;

use crate::lattice::{pnorm, PExp, ZVector};


#[derive(Clone, Debug)]
pub struct Progression {
    /// Position of the target in the input list.
    pub target: usize,
    /// First index with a_k >= max(γ, ‖x‖).
    pub m: u64,
    pub prime: u64,
    /// p_0 ⋯ p_{n-1}; `None` once it exceeds u64 (then no u64 index lies in the set).
    pub prefix: Option<u64>,
}

impl Progression {
    /// Density of {prefix·(j·prime + 1) : j >= 1}.
    pub fn density(&self) -> f64 {
        match self.prefix {
            Some(q) => 1.0 / (q as f64 * self.prime as f64),
            None => 0.0,
        }
    }

    pub fn contains(&self, m: u64) -> bool {
        let Some(q) = self.prefix else { return false };
        if m % q != 0 {
            return false;
        }
        let s = m / q;
        s > self.prime && s % self.prime == 1
    }

    /// The j-th element, j >= 1.
    pub fn element(&self, j: u64) -> Option<u64> {
        self.prefix?.checked_mul(j.checked_mul(self.prime)?.checked_add(1)?)
    }
}

#[derive(Clone, Debug)]
pub struct Kappa {
    pub targets: Vec<ZVector>,
    pub progressions: Vec<Progression>,
    /// Targets whose size a never reaches within the scan.
    pub unassigned: Vec<usize>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn next_prime_above(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Builds κ from targets and the non-decreasing sequence a.
pub fn build_kappa(targets: Vec<ZVector>, a: &dyn Fn(u64) -> f64, p: PExp, scan: u64) -> Kappa {
    let mut progressions: Vec<Progression> = Vec::new();
    let mut unassigned = Vec::new();
    let mut last_m = 0u64;
    let mut last_prime = 1u64;
    let mut prefix: Option<u64> = Some(1);
    for (i, x) in targets.iter().enumerate() {
        assert!(!x.is_empty(), "targets must be nonzero");
        let size = (x.gamma() as f64).max(pnorm(x, p).map(|m| m.to_linear_saturating()).unwrap_or(0.0));
        let start = last_m + 1;
        let Some(m) = (start..=scan).find(|&k| a(k) >= size) else {
            unassigned.push(i);
            continue;
        };
        let prime = next_prime_above(m.max(last_prime));
        progressions.push(Progression { target: i, m, prime, prefix });
        prefix = prefix.and_then(|q| q.checked_mul(prime));
        last_m = m;
        last_prime = prime;
    }
    Kappa { targets, progressions, unassigned }
}

impl Kappa {
    /// Index into `progressions` of the set containing m.
    pub fn progression_of(&self, m: u64) -> Option<usize> {
        // m lies in A_n only if p_0 ⋯ p_{n-1} divides m, so the scan stops at the first failure
        for (n, pr) in self.progressions.iter().enumerate() {
            if pr.contains(m) {
                return Some(n);
            }
            match pr.prefix {
                Some(q) if m % (q * pr.prime) == 0 => continue,
                _ => return None,
            }
        }
        None
    }

    pub fn get(&self, m: u64) -> ZVector {
        match self.progression_of(m) {
            Some(n) => self.targets[self.progressions[n].target].clone(),
            None => ZVector::zero(),
        }
    }
}

/// A fixed list of distinct nonzero finitely supported vectors: c·e_j with j running 0, 1, -1, 2, …
pub fn default_targets(count: usize) -> Vec<ZVector> {
    let coefs = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-0.5, 0.0)];
    (0..count)
        .map(|i| {
            let t = (i / coefs.len()) as i128;
            let j = if t % 2 == 1 { (t + 1) / 2 } else { -t / 2 };
            ZVector::from_pairs([(j, coefs[i % coefs.len()])])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> ZVector {
        ZVector::basis(0)
    }

    #[test]
    fn single_target_on_odd_numbers() {
        let k = build_kappa(vec![one()], &|n| n as f64, PExp::Finite(2.0), 100);
        assert_eq!(k.progressions[0].prime, 2);
        let hits: Vec<u64> = (0..12).filter(|&m| k.progression_of(m).is_some()).collect();
        assert_eq!(hits, vec![3, 5, 7, 9, 11]);
        assert_eq!(k.progressions[0].density(), 0.5);
        assert!(k.get(4).is_empty());
    }

    #[test]
    fn two_targets_are_disjoint() {
        let k = build_kappa(vec![one(), ZVector::basis(1)], &|n| n as f64, PExp::Finite(2.0), 100);
        assert_eq!(k.progressions[1].prime, 3);
        let a1: Vec<u64> = (1..4).map(|j| k.progressions[1].element(j).unwrap()).collect();
        assert_eq!(a1, vec![8, 14, 20]);
        for m in 0..2000 {
            let in0 = k.progressions[0].contains(m);
            let in1 = k.progressions[1].contains(m);
            assert!(!(in0 && in1));
        }
    }

    #[test]
    fn unreachable_target_is_reported() {
        let big = ZVector::basis(50);
        let k = build_kappa(vec![one(), big], &|n| (n as f64).min(3.0), PExp::Finite(2.0), 1000);
        assert_eq!(k.unassigned, vec![1]);
    }
}
