//! Phases e^{2πi·num/den} with the reduction done in integers, so huge frequencies lose nothing.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// num/den reduced into [0, 1), as a float.
pub fn turns(num: &BigInt, den: &BigInt) -> f64 {
    let r = num.mod_floor(den);
    ratio(&r, den)
}

fn ratio(a: &BigInt, b: &BigInt) -> f64 {
    // shift only when the denominator would overflow a double
    let shift = b.bits().saturating_sub(1000);
    if shift == 0 {
        to_f64(a) / to_f64(b)
    } else {
        to_f64(&(a >> shift)) / to_f64(&(b >> shift))
    }
}

/// num/den reduced into [-1/2, 1/2).
fn centered(num: &BigInt, den: &BigInt) -> f64 {
    let r = num.mod_floor(den);
    let twice: BigInt = &r << 1;
    if &twice >= den {
        -ratio(&(den - &r), den)
    } else {
        ratio(&r, den)
    }
}

/// e^{2πi·num/den}.
pub fn cis(num: &BigInt, den: &BigInt) -> Complex64 {
    let t = centered(num, den);
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// sin(π·num/den), reduced modulo 2.
fn sin_pi(num: &BigInt, den: &BigInt) -> f64 {
    if num.mod_floor(den).is_zero() {
        return 0.0;
    }
    let two_den: BigInt = den << 1;
    let r = centered(num, &two_den) * 2.0;
    (PI * r).sin()
}

/// Σ_{s=0}^{n-1} e^{2πi s·num/den}.
pub fn geo(num: &BigInt, den: &BigInt, n: &BigInt) -> Complex64 {
    if !n.is_positive() {
        return Complex64::new(0.0, 0.0);
    }
    let mut r = num.mod_floor(den);
    if r.is_zero() {
        return Complex64::new(to_f64(n), 0.0);
    }
    if &(&r << 1) > den {
        r -= den;
    }
    // e^{iπθ(n-1)} sin(πθn)/sin(πθ) with θ = r/den ∈ (-1/2, 1/2]
    let num_n = &r * n;
    let s_n = sin_pi(&num_n, den);
    let s_1 = (PI * ratio(&r, den)).sin();
    let head = cis(&(&r * (n - 1u32)), &(den << 1));
    head * (s_n / s_1)
}

/// Σ_{s=a}^{b-1} e^{2πi s·num/den}.
pub fn geo_range(num: &BigInt, den: &BigInt, a: &BigInt, b: &BigInt) -> Complex64 {
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    cis(&(num * a), den) * geo(num, den, &(b - a))
}

/// ∫_0^{len_num/len_den} e^{2πiωu} du.
pub fn segment_integral(omega: &BigInt, len_num: &BigInt, len_den: &BigInt) -> Complex64 {
    let len = ratio(len_num, len_den);
    if omega.is_zero() {
        return Complex64::new(len, 0.0);
    }
    // e^{iπωL} sin(πωL)/(πω)
    let prod = omega * len_num;
    let head = cis(&prod, &(len_den << 1));
    let s = sin_pi(&prod, len_den);
    head * (s / (PI * to_f64(omega)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn geo_matches_direct_sum() {
        for (num, den, n) in [(1, 7, 5), (3, 8, 8), (5, 12, 30), (-2, 9, 4), (0, 5, 6), (7, 7, 3)] {
            let direct: Complex64 = (0..n)
                .map(|s| Complex64::from_polar(1.0, 2.0 * PI * (s * num) as f64 / den as f64))
                .sum();
            let g = geo(&b(num), &b(den), &b(n));
            assert!((g - direct).norm() < 1e-12, "{num}/{den} n={n}: {g} vs {direct}");
        }
    }

    #[test]
    fn huge_frequencies_reduce_exactly() {
        let den = BigInt::from(10u32).pow(40);
        let num = &den * BigInt::from(123456789u64) + 1;
        let c = cis(&num, &den);
        assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-30 + 1e-15);
        let half = &den * BigInt::from(3u32) + (&den >> 1);
        assert!((cis(&half, &den) + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn segment_integral_closed_form() {
        let v = segment_integral(&b(1), &b(1), &b(2));
        // ∫_0^{1/2} e^{2πiu} du = i/π
        assert!((v - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-15);
        assert!((segment_integral(&b(0), &b(3), &b(4)).re - 0.75).abs() < 1e-15);
        assert!(segment_integral(&b(4), &b(1), &b(4)).norm() < 1e-15);
    }
}
