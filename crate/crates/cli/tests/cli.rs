use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigInt;
use shiftlab::measure::serial::read_layered;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shiftlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("shiftlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in report"))
}

#[test]
fn criteria_examples_are_violated() {
    for args in [
        &["criteria", "--family", "unweighted", "--stat", "super", "--kmax", "3", "--horizon", "1000"][..],
        &["criteria", "--family", "chan-sanders", "--stat", "hyper"][..],
        &["criteria", "--family", "triadic", "--p", "3", "--stat", "super"][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert_eq!(field(&stdout(&o), "verdict"), "\"violated\"", "{args:?}");
    }
}

#[test]
fn criteria_writes_the_series() {
    let d = scratch("criteria");
    let o = run(&["criteria", "--family", "unweighted", "--stat", "super", "--kmax", "2", "--horizon", "50", "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(d.join("criteria_series.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 3 * 50);
    assert!(rows.iter().all(|x| x[2].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn certificate_exit_codes() {
    assert_eq!(run(&["certify", "--cert", "log", "--p", "3"]).status.code(), Some(0));
    let o = run(&["certify", "--cert", "log", "--p", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(field(&stdout(&o), "pass"), "false");
    let o = run(&["certify", "--cert", "closedness", "--norms", "geometric:2", "--norm-space", "banach"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "closed"), "true");
    assert_eq!(run(&["certify", "--cert", "closedness", "--norms", "power:0.25", "--norm-space", "hilbert"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["criteria"][..],
        &["criteria", "--family", "nope"][..],
        &["criteria", "--family", "unweighted", "--stat", "mega"][..],
        &["certify", "--cert", "triadic"][..],
        &["measure", "--stages", "0"][..],
        &["measure", "--stages", "2", "--delta", "0.5"][..],
        &["bogus"][..],
        &[][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_config_exits_two() {
    let d = scratch("config");
    let bad = d.join("bad.toml");
    std::fs::write(&bad, "command = \"measure\"\n[measure]\nstages = \"six\"\n").unwrap();
    let o = run(&["--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let unknown = d.join("unknown.toml");
    std::fs::write(&unknown, "[measure]\nstagez = 2\n").unwrap();
    assert_eq!(run(&["measure", "--config", unknown.to_str().unwrap()]).status.code(), Some(2));
    let clash = d.join("clash.toml");
    std::fs::write(&clash, "command = \"certify\"\n").unwrap();
    assert_eq!(run(&["measure", "--config", clash.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_mirrors_flags_and_flags_win() {
    let d = scratch("mirror");
    let cfg = d.join("run.toml");
    std::fs::write(&cfg, "command = \"criteria\"\n[criteria]\nfamily = \"unweighted\"\nstat = \"hyper\"\nkmax = 1\nhorizon = 20\ntol-log2 = -10\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert_eq!(field(&r, "statistic"), "\"hyper\"");
    assert_eq!(field(&r, "horizon"), "20");
    assert_eq!(field(&r, "tol_log2"), "-10.0");
    let o = run(&["criteria", "--config", cfg.to_str().unwrap(), "--horizon", "30"]);
    assert_eq!(field(&stdout(&o), "horizon"), "30");
}

#[test]
fn thread_variable_is_validated() {
    let o = bin().args(["measure", "--stages", "1"]).env("SHIFTLAB_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["measure", "--stages", "1"]).env("SHIFTLAB_THREADS", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn growth_cap_is_an_internal_failure() {
    let o = run(&["measure", "--stages", "4", "--max-k-bits", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bits"));
}

#[test]
fn one_stage_is_the_lebesgue_seed() {
    let d = scratch("one");
    let o = run(&["measure", "--stages", "1", "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mu = read_layered(&std::fs::read_to_string(d.join("measure.txt")).unwrap()).unwrap();
    assert_eq!(mu.levels(), 1);
}

fn strip_timestamp(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with("timestamp")).collect::<Vec<_>>().join("\n")
}

#[test]
fn six_stages_report_round_trip_and_determinism() {
    let a = scratch("six-a");
    let b = scratch("six-b");
    for d in [&a, &b] {
        let o = run(&["measure", "--stages", "6", "--h-count", "4", "--family-horizon", "10000", "--out", d.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["report.toml", "checks.csv", "fourier.csv", "decay.csv", "weak_convergence.csv", "measure.txt"] {
        assert_eq!(strip_timestamp(&a.join(f)), strip_timestamp(&b.join(f)), "{f}");
    }
    let report = std::fs::read_to_string(a.join("report.toml")).unwrap();
    assert_eq!(field(&report, "passed"), "true");
    let mut checks = csv::Reader::from_path(a.join("checks.csv")).unwrap();
    let mut names = std::collections::BTreeSet::new();
    for r in checks.records() {
        let r = r.unwrap();
        assert_eq!(&r[6], "true", "{r:?}");
        names.insert(r[1].split_whitespace().next().unwrap().to_string());
    }
    for p in ["P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "B1", "B2", "B3", "B4"] {
        assert!(names.contains(p), "{p} missing from {names:?}");
    }

    // the written measure reloads with the same coefficients
    let mu = read_layered(&std::fs::read_to_string(a.join("measure.txt")).unwrap()).unwrap();
    let mut fourier = csv::Reader::from_path(a.join("fourier.csv")).unwrap();
    let mut count = 0;
    for r in fourier.records() {
        let r = r.unwrap();
        let k: i64 = r[0].parse().unwrap();
        let v = mu.fourier(&BigInt::from(k));
        assert!((v.re - r[1].parse::<f64>().unwrap()).abs() <= 1e-12, "k = {k}");
        assert!((v.im - r[2].parse::<f64>().unwrap()).abs() <= 1e-12, "k = {k}");
        count += 1;
    }
    assert_eq!(count, 201);
}
