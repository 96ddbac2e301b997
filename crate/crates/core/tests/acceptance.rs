//! One line per acceptance criterion. Criterion 4 is known to fail as written (see README); the
//! `acceptance` test asserts every other criterion and that 4 still fails, and
//! `criterion_4_as_written` asserts it outright (ignored).

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shiftlab::closure::closedness::row_sum_check;
use shiftlab::closure::divergence::{weak_zero_divergence, CoefSeq, Exponent};
use shiftlab::closure::pseq::gram_2seq_bound;
use shiftlab::closure::series::Trend;
use shiftlab::criteria::{
    build_w_vector, check_w_conditions, evaluate_criterion, salas_super_stat, verify_weight_identities, Space, Statistic, Verdict,
    WCertificate, WVectorOptions, WeightFamily, DEFAULT_TOL,
};
use shiftlab::lattice::{Idx, LogMag, PExp, pnorm};
use shiftlab::measure::circle::{CircleMeasure, Segment};
use shiftlab::measure::construct::CheckKind;
use shiftlab::measure::driver::{rajchman_driver, DriverOptions, GRAM_LIMIT};
use shiftlab::measure::kronecker::{defect, kronecker_search};

const KNOWN_FAILING: &[usize] = &[4];

struct Line {
    n: usize,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(n: usize, budget: Duration, f: impl FnOnce() -> (bool, String)) -> Line {
    let t = Instant::now();
    let (ok, mut detail) = f();
    let elapsed = t.elapsed();
    let in_time = elapsed < budget;
    if !in_time {
        detail.push_str(&format!("; over the {budget:?} budget"));
    }
    Line { n, pass: ok && in_time, detail, elapsed }
}

// 1. log2 β(1,a) = a − 7·9^k on (7·9^k, 9^{k+1}] for k = 0, 2
fn criterion_1() -> Line {
    timed(1, Duration::from_secs(1), || {
        let w = WeightFamily::NineAdic.sequence().unwrap();
        let mut bad = 0;
        let mut count = 0;
        for k in [0u32, 2] {
            let lo = 7 * 9i128.pow(k);
            for a in lo + 1..=9i128.pow(k + 1) {
                let got = w.beta(1, a).unwrap().0;
                // oracle: the weights multiplied one by one
                let direct: f64 = (1..=a).map(|j| w.eval(j).0).sum();
                if got != (a - lo) as f64 || direct != (a - lo) as f64 {
                    bad += 1;
                }
                count += 1;
            }
        }
        let rep = verify_weight_identities(&WeightFamily::NineAdic, 2).unwrap();
        (bad == 0 && rep.max_abs_err == 0.0 && rep.prefix_agrees, format!("{count} values of a, {bad} mismatches"))
    })
}

/// ln of the weight at m, straight from the defining table, and ln φ.
struct TriadicOracle {
    p: f64,
}

impl TriadicOracle {
    fn ln_phi(&self, t: f64) -> f64 {
        ((t + 1.0).ln() + 2.0 * (t + 2.0).log2().ln()) / self.p
    }

    fn ln_weight(&self, m: i128) -> f64 {
        let m = m.abs();
        let pows: Vec<i128> = (0..40).map(|e| 3i128.pow(e)).collect();
        if m == 0 || pows.contains(&m) {
            return 0.0;
        }
        let n = pows.iter().rposition(|&x| x < m).unwrap();
        let (pn, pn1) = (pows[n], pows[n + 1]);
        if m <= pn1 - pn {
            return (self.ln_phi(n as f64 + 1.0) - 2.0 * self.ln_phi(n as f64)) / pn as f64;
        }
        // 3^{n+1} − 3^{k+1} < m <= 3^{n+1} − 3^k with k <= n − 1
        let k = (0..n).find(|&k| pn1 - pows[k + 1] < m && m <= pn1 - pows[k]).unwrap();
        (self.ln_phi(k as f64 + 1.0) - self.ln_phi(k as f64)) / (2.0 * pows[k] as f64)
    }
}

// 2. log β(1, 3^n − 3^k) = log φ(n)/φ(k) and log β(1, 3^n) = log φ(n)
fn criterion_2() -> Line {
    timed(2, Duration::from_secs(5), || {
        let mut worst = 0f64;
        let mut count = 0;
        for p in [2.5, 3.0, 4.0] {
            let w = WeightFamily::Triadic { p }.sequence().unwrap();
            let o = TriadicOracle { p };
            let top = 3i128.pow(7);
            let mut run = vec![0f64; top as usize + 1];
            for i in 1..=top {
                run[i as usize] = run[i as usize - 1] + o.ln_weight(i);
            }
            let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1e-300);
            for n in 1..=7u32 {
                let pn = 3i128.pow(n);
                let want = o.ln_phi(n as f64);
                worst = worst.max(rel(w.beta(1, pn).unwrap().0 * LN_2, want)).max(rel(run[pn as usize], want));
                count += 1;
                for k in 0..n {
                    let a: Idx = pn - 3i128.pow(k);
                    let want = o.ln_phi(n as f64) - o.ln_phi(k as f64);
                    worst = worst.max(rel(w.beta(1, a).unwrap().0 * LN_2, want)).max(rel(run[a as usize], want));
                    count += 1;
                }
            }
        }
        (worst <= 1e-9, format!("{count} identities, worst relative error {worst:.2e}"))
    })
}

// 3. Salas suite
fn criterion_3() -> Line {
    timed(3, Duration::from_secs(30), || {
        let mut notes = Vec::new();
        let u = WeightFamily::Unweighted.sequence().unwrap();
        let v = evaluate_criterion(&u, Statistic::Super, 5, 10_000, DEFAULT_TOL);
        let ones = v.per_k.iter().all(|s| s.series.iter().all(|x| x.0 == 0.0));
        notes.push(format!("unweighted super {} (all ones: {ones})", v.verdict.name()));
        let ok1 = ones && v.verdict == Verdict::Violated;

        let cs = WeightFamily::ChanSanders.sequence().unwrap();
        let v = evaluate_criterion(&cs, Statistic::Hyper, 3, 10_000, DEFAULT_TOL);
        let min_ok = v.per_k.iter().all(|s| s.running_min.0 >= 0.0);
        notes.push(format!("chan-sanders hyper {} (min 2^{})", v.verdict.name(), v.running_min().0));
        let super30 = (0..=3u32).map(|k| (1..=30).map(|n| salas_super_stat(&cs, k, n).0).fold(f64::INFINITY, f64::min)).fold(f64::NEG_INFINITY, f64::max);
        notes.push(format!("chan-sanders super min by n = 30 is 2^{super30} for every k <= 3"));
        let ok2 = min_ok && v.verdict == Verdict::Violated && super30 <= -20.0;

        let t = WeightFamily::Triadic { p: 3.0 }.sequence().unwrap();
        let v = evaluate_criterion(&t, Statistic::Super, 3, 10_000, DEFAULT_TOL);
        let floor = v.floor.as_ref().map(|f| f.reason).unwrap_or("none");
        notes.push(format!("triadic(3) super {} via '{floor}'", v.verdict.name()));
        let ok3 = v.verdict == Verdict::Violated && floor.starts_with("symmetric");
        (ok1 && ok2 && ok3, notes.join("; "))
    })
}

/// W3 relative last-decade increment, W4 ratio S(10^5)/S(10^4), overall pass, p = 2 pass.
fn criterion_4_values() -> (f64, f64, bool, bool) {
    let u = WeightFamily::Unweighted.sequence().unwrap();
    let r = check_w_conditions(&u, &WCertificate::log_certificate(3.0), 100_000, Space::Lp).unwrap();
    let w3 = (r.w3.sums.at(100_000) - r.w3.sums.at(10_000)) / r.w3.sums.at(10_000);
    let w4 = r.w4.sums.at(100_000) / r.w4.sums.at(10_000);
    let r2 = check_w_conditions(&u, &WCertificate::log_certificate(2.0), 100_000, Space::Lp).unwrap();
    (w3, w4, r.pass, r2.pass)
}

// 4. log certificate at p = 3 and p = 2
fn criterion_4() -> Line {
    timed(4, Duration::from_secs(60), || {
        let (w3, w4, pass3, pass2) = criterion_4_values();
        let ok = w3 < 1e-3 && w4 >= 1.3 && pass3 && !pass2;
        (ok, format!("W3 last-decade increment {w3:.3e} (relative), W4 S(1e5)/S(1e4) = {w4:.4} (need 1.3), p=3 pass {pass3}, p=2 pass {pass2}"))
    })
}

// 5. vector built from the log certificate, 6 stages
fn criterion_5() -> Line {
    timed(5, Duration::from_secs(10), || {
        let u = WeightFamily::Unweighted.sequence().unwrap();
        let cert = WCertificate::log_certificate(3.0);
        let v = build_w_vector(&u, &cert, &WVectorOptions { stages: 6, ..Default::default() }).unwrap();
        let mut disjoint = true;
        for i in 0..v.summands.len() {
            for j in i + 1..v.summands.len() {
                disjoint &= v.summands[i].support().all(|a| v.summands[j].get(a).is_none());
            }
        }
        // ‖u‖_3^3 from the entries of u, against the summands' norms
        let direct: f64 = v.u.iter().map(|(_, e)| e.mag.to_linear_saturating().powi(3)).sum();
        let summed: f64 = v.summands.iter().map(|s| pnorm(s, PExp::Finite(3.0)).map(|m| m.to_linear_saturating().powi(3)).unwrap_or(0.0)).sum();
        let rel = (direct - summed).abs() / summed;
        let rel_lib = (v.norm_pow - v.norm_pow_sum).abs() / v.norm_pow_sum;
        let mut yz = true;
        for i in 0..v.yz.len() {
            for j in i + 1..v.yz.len() {
                yz &= v.yz[i].supports_disjoint(&v.yz[j]);
            }
        }
        let ok = disjoint && v.summands_disjoint && rel <= 1e-9 && rel_lib <= 1e-9 && yz && v.yz_disjoint;
        (ok, format!("{} summands disjoint {disjoint}, norm mismatch {rel:.1e}, y_k disjoint {yz}", v.summands.len()))
    })
}

// 6. measure pipeline, h_count 4, 6 stages, δ_n = 2^-n
fn criterion_6() -> Line {
    timed(6, Duration::from_secs(300), || {
        let r = match rajchman_driver(&DriverOptions { h_count: 4, stages: 6, ..Default::default() }) {
            Ok(r) => r,
            Err(e) => return (false, format!("driver failed: {e}")),
        };
        let c = &r.construction;
        let mut bad: Vec<String> = c
            .checks()
            .filter(|e| e.name.starts_with('P') && !(e.pass && e.slack() > 0.0))
            .map(|e| format!("{} stage {}", e.name, e.stage))
            .collect();
        for s in &c.states {
            let eps = s.eps;
            let a_next = c.f[s.stage].sup_bound();
            for e in &s.checks {
                let ok = match e.name.as_str() {
                    "B1" => e.value <= 1e-12,
                    "B2" | "B3" => e.value < eps,
                    "B4" => e.kind == CheckKind::Sampled && e.value <= 2.0 * a_next + 1e-9,
                    _ => true,
                };
                if !ok {
                    bad.push(format!("{} stage {} = {}", e.name, s.stage, e.value));
                }
            }
        }
        // final pairings against 2^-n, recomputed from the measure
        let mu = &c.measure;
        let mut worst = 0f64;
        for n in 2..=6usize {
            for d in 1..n {
                let v = mu.pair(&(&c.g[n - 1] * &c.g[d - 1].conj())).norm();
                worst = worst.max(v * 2f64.powi(n as i32));
                if v >= 0.5f64.powi(n as i32) {
                    bad.push(format!("pairing {n},{d} = {v:.3e}"));
                }
            }
        }
        let gram_ok = r.gram.c <= GRAM_LIMIT + 1e-6;
        let ok = bad.is_empty() && gram_ok && r.passed();
        (
            ok,
            format!(
                "{} checks, Gram sum {:.3e} (limit 1/9), max |pairing|·2^n = {worst:.3e}, k_6 has {} bits{}",
                c.checks().count(),
                r.gram.c,
                c.states.last().unwrap().k.bits(),
                if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join(", ")) }
            ),
        )
    })
}

// 7. √2 mod 1 toward angle 0 within 0.01 turns
fn criterion_7() -> Line {
    timed(7, Duration::from_secs(1), || {
        let t = 2f64.sqrt().fract();
        let k = kronecker_search(&[t], &[0.0], 0, 0.01, 10_000).unwrap();
        let scan = (1..=10_000u64).find(|&k| defect(&[t], &[0.0], k) < 0.01).unwrap();
        (k == 70 && scan == 70, format!("k = {k}, linear scan {scan}"))
    })
}

fn rand_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Complex adaptive Simpson on [a, b].
fn simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn rec(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64, whole: Complex64, tol: f64, depth: u32) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.norm() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    // pre-split so the first samples cannot alias an oscillation of up to 64 periods
    let pieces = 256;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (a, b) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            rec(f, a, b, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

// 8. property suites on seeded samples
fn criterion_8() -> Line {
    timed(8, Duration::from_secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut notes = Vec::new();

        // (a) ‖Σ a_j g_j‖ <= bound·‖a‖₂ over 200 random families in C^d
        let mut worst_a = f64::NEG_INFINITY;
        for _ in 0..200 {
            let n = rng.gen_range(1..8);
            let d = rng.gen_range(1..12);
            let g: Vec<Vec<Complex64>> = (0..n).map(|_| (0..d).map(|_| rand_c(&mut rng)).collect()).collect();
            let ip = |x: &[Complex64], y: &[Complex64]| x.iter().zip(y).map(|(a, b)| a * b.conj()).sum::<Complex64>();
            let norms: Vec<f64> = g.iter().map(|v| ip(v, v).re.sqrt()).collect();
            let stats = gram_2seq_bound(&norms, |i, j| ip(&g[i], &g[j]));
            let a: Vec<Complex64> = (0..n).map(|_| rand_c(&mut rng)).collect();
            let comb: Vec<Complex64> = (0..d).map(|t| (0..n).map(|j| a[j] * g[j][t]).sum()).collect();
            let lhs = ip(&comb, &comb).re.sqrt();
            let a2 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            worst_a = worst_a.max(lhs - stats.bound * a2);
        }
        let ok_a = worst_a <= 1e-9;
        notes.push(format!("(a) worst excess {worst_a:.2e}"));

        // (b) sorted row sums S_(j) >= j/2 on 100 matrices with max(a_ij, a_ji) >= 1
        let mut ok_b = true;
        for _ in 0..100 {
            let n = rng.gen_range(1..=50);
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                a[i][i] = rng.gen_range(1.0..2.0);
                for j in 0..i {
                    let (big, small) = (rng.gen_range(1.0..3.0), rng.gen_range(0.0..1.0));
                    if rng.gen_bool(0.5) {
                        (a[i][j], a[j][i]) = (big, small);
                    } else {
                        (a[i][j], a[j][i]) = (small, big);
                    }
                }
            }
            let mut sums: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
            sums.sort_by(f64::total_cmp);
            let oracle = sums.iter().enumerate().all(|(j, s)| *s >= (j + 1) as f64 / 2.0);
            let rep = row_sum_check(&a, 1.5).unwrap();
            ok_b &= oracle && rep.half_bound && rep.sorted == sums;
        }
        notes.push(format!("(b) {}", if ok_b { "all hold" } else { "violated" }));

        // (c) Σ (n+1)^{-sq} against the integral test and ζ
        let mut ok_c = true;
        for s in [0.2, 0.5, 1.0, 2.0] {
            for q in [1.5, 2.0, 3.0] {
                let e: f64 = s * q;
                let v = weak_zero_divergence(&CoefSeq::power(s), Exponent::Finite(q), 10_000).unwrap();
                if e <= 1.0 {
                    ok_c &= v.trend == Trend::DivergingAtHorizon;
                } else {
                    // ζ(e) by Euler–Maclaurin at M = 1000
                    let m = 1000f64;
                    let zeta = (1..=1000).map(|i| (i as f64).powf(-e)).sum::<f64>() + m.powf(1.0 - e) / (e - 1.0) - 0.5 * m.powf(-e)
                        + e * m.powf(-e - 1.0) / 12.0;
                    let (lo, hi) = v.limit_bracket.unwrap();
                    ok_c &= v.trend == Trend::ConvergingAtHorizon && lo <= zeta + 1e-12 && zeta <= hi + 1e-12;
                }
            }
        }
        notes.push(format!("(c) {}", if ok_c { "agrees" } else { "disagrees" }));

        // (d) Fourier coefficients against quadrature on 50 random measures
        let mut worst_d = 0f64;
        for _ in 0..50 {
            let cuts: usize = rng.gen_range(2..8);
            let mut pts: Vec<f64> = (0..cuts).map(|_| rng.gen_range(0.0..1.0)).collect();
            pts.push(0.0);
            pts.push(1.0);
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let mut segs = Vec::new();
            let mut atoms = Vec::new();
            for w in pts.windows(2) {
                if rng.gen_bool(0.7) && w[1] - w[0] > 1e-6 {
                    segs.push(Segment { t0: w[0], t1: w[1], height: rng.gen_range(0.0..3.0) });
                } else if rng.gen_bool(0.5) && w[0] < 1.0 {
                    atoms.push((w[0], rng.gen_range(0.01..1.0)));
                }
            }
            atoms.retain(|(t, _)| !segs.iter().any(|s: &Segment| s.t0 < *t && *t < s.t1));
            let mu = CircleMeasure::new(atoms.clone(), segs.clone()).unwrap();
            for k in -50i64..=50 {
                let kf = k as f64;
                let mut want: Complex64 = atoms.iter().map(|(t, m)| m * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * kf * t)).sum();
                for s in &segs {
                    let h = s.height;
                    want += simpson(&|t| h * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * kf * t), s.t0, s.t1, 1e-12);
                }
                worst_d = worst_d.max((mu.fourier(k) - want).norm());
            }
        }
        let ok_d = worst_d <= 1e-9;
        notes.push(format!("(d) worst gap {worst_d:.2e}"));
        (ok_a && ok_b && ok_c && ok_d, notes.join("; "))
    })
}

fn print(l: &Line) {
    println!(
        "criterion {}: {} ({:.2?}) {}",
        l.n,
        if l.pass { "PASS" } else { "FAIL" },
        l.elapsed,
        l.detail
    );
}

#[test]
fn acceptance() {
    let lines = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5(), criterion_6(), criterion_7(), criterion_8()];
    for l in &lines {
        print(l);
    }
    for l in &lines {
        if KNOWN_FAILING.contains(&l.n) {
            assert!(!l.pass, "criterion {} now passes; take it off the known-failing list", l.n);
        } else {
            assert!(l.pass, "criterion {} failed: {}", l.n, l.detail);
        }
    }
}

#[test]
#[ignore = "W4 grows like ln ln N; S(1e5)/S(1e4) is about 1.19, below the required 1.3"]
fn criterion_4_as_written() {
    let l = criterion_4();
    print(&l);
    assert!(l.pass, "{}", l.detail);
}

#[test]
fn super_statistic_floor_is_not_a_tolerance_artifact() {
    // the unweighted super statistic is exactly 1 at every n, so no tolerance can call it small
    let u = WeightFamily::Unweighted.sequence().unwrap();
    for n in [1, 10, 1000] {
        assert_eq!(salas_super_stat(&u, 0, n), LogMag::UNIT);
    }
}
