use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use shiftlab::closure::closedness::{closedness_certificate, SpaceKind};
use shiftlab::closure::divergence::{CoefSeq, Tail};
use shiftlab::closure::series::PartialSums;
use shiftlab::criteria::{build_w_vector, check_w_conditions, evaluate_criterion, Space, Statistic, WCertificate, WVectorOptions, WeightFamily};
use shiftlab::lattice::LogMag;
use shiftlab::measure::construct::ConstructOptions;
use shiftlab::measure::driver::{rajchman_driver, DriverOptions, GRAM_LIMIT};
use shiftlab::measure::serial::write_layered;

use crate::config::{CertifyArgs, CriteriaArgs, MeasureArgs};
use crate::{render, timestamp, Failure, Outcome};

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Internal(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Internal(format!("csv: {e}")))
}

fn sums_rows(label: &str, s: &PartialSums) -> Vec<Vec<String>> {
    s.checkpoints.iter().map(|(n, v)| vec![label.to_string(), n.to_string(), v.to_string()]).collect()
}

#[derive(Serialize)]
struct FloorOut {
    k: u32,
    value_log2: f64,
    reason: String,
}

#[derive(Serialize)]
struct KOut {
    k: u32,
    min_log2: f64,
    argmin: i64,
}

#[derive(Serialize)]
struct CriteriaReport {
    command: &'static str,
    timestamp: u64,
    family: String,
    statistic: &'static str,
    k_max: u32,
    horizon: i64,
    tol_log2: f64,
    verdict: &'static str,
    running_min_log2: f64,
    floor: Option<FloorOut>,
    per_k: Vec<KOut>,
}

pub fn criteria(a: &CriteriaArgs) -> Result<Outcome, Failure> {
    let family = WeightFamily::parse(a.family.as_deref().ok_or_else(|| usage("criteria needs --family"))?, a.p)?;
    let stat_name = a.stat.as_deref().unwrap_or("super");
    let stat = Statistic::parse(stat_name).ok_or_else(|| usage(format!("unknown statistic '{stat_name}'")))?;
    let k_max = a.kmax.unwrap_or(3);
    let horizon = a.horizon.unwrap_or(10_000);
    if horizon < 1 {
        return Err(usage("horizon must be at least 1"));
    }
    let tol = LogMag(a.tol_log2.unwrap_or(-20.0));
    let w = family.sequence()?;
    let v = evaluate_criterion(&w, stat, k_max, horizon as _, tol);
    let report = CriteriaReport {
        command: "criteria",
        timestamp: timestamp(),
        family: family.name(),
        statistic: stat.name(),
        k_max,
        horizon,
        tol_log2: tol.0,
        verdict: v.verdict.name(),
        running_min_log2: v.running_min().0,
        floor: v.floor.as_ref().map(|f| FloorOut { k: f.k, value_log2: f.value.0, reason: f.reason.to_string() }),
        per_k: v.per_k.iter().map(|s| KOut { k: s.k, min_log2: s.running_min.0, argmin: s.argmin as i64 }).collect(),
    };
    let rows = v.per_k.iter().flat_map(|s| s.series.iter().enumerate().map(move |(i, x)| vec![s.k.to_string(), (i + 1).to_string(), x.0.to_string()]));
    let series = csv_string(&["k", "n", "log2_stat"], rows)?;
    // a violated verdict is a finding about the weights, not a failed run
    Ok(Outcome { report: render(&report)?, files: vec![("criteria_series.csv".into(), series)], pass: true })
}

#[derive(Serialize)]
struct ConditionOut {
    name: &'static str,
    trend: &'static str,
    certified: bool,
    total: f64,
    ratio_decade: f64,
    ratio_century: f64,
    note: String,
}

#[derive(Serialize)]
struct VectorOut {
    stages: usize,
    shift: u64,
    support: usize,
    summands_disjoint: bool,
    norm_pow: f64,
    norm_pow_sum: f64,
    minus_ratio: f64,
}

#[derive(Serialize)]
struct WCertReport {
    command: &'static str,
    timestamp: u64,
    certificate: String,
    family: String,
    p: f64,
    space: &'static str,
    horizon_requested: u64,
    horizon_used: u64,
    reindex_offset: Option<u64>,
    pass: bool,
    conditions: Vec<ConditionOut>,
    vector: Option<VectorOut>,
}

#[derive(Serialize)]
struct ClosednessReport {
    command: &'static str,
    timestamp: u64,
    norms: String,
    space: String,
    exponent: f64,
    trend: &'static str,
    certified: bool,
    partial_sum: f64,
    limit_bracket: Option<(f64, f64)>,
    closed: bool,
}

pub fn certify(a: &CertifyArgs) -> Result<Outcome, Failure> {
    let kind = a.cert.as_deref().unwrap_or("log");
    if kind == "closedness" {
        return closedness(a);
    }
    let (cert, default_family) = match kind {
        "log" => {
            let p = a.p.unwrap_or(3.0);
            (WCertificate::log_certificate(p), WeightFamily::Unweighted)
        }
        "nine-adic" => (WCertificate::nine_adic_certificate(false), WeightFamily::NineAdic),
        "nine-adic-inverse" => (WCertificate::nine_adic_certificate(true), WeightFamily::NineAdicInverse),
        "triadic" => {
            let p = a.p.ok_or_else(|| usage("the triadic certificate needs --p"))?;
            (WCertificate::triadic_certificate(p), WeightFamily::Triadic { p })
        }
        other => return Err(usage(format!("unknown certificate '{other}'"))),
    };
    let family = match &a.family {
        Some(f) => WeightFamily::parse(f, a.p)?,
        None => default_family,
    };
    let space = match a.space.as_deref().unwrap_or("lp") {
        "lp" => Space::Lp,
        "c0" => Space::C0,
        other => return Err(usage(format!("unknown space '{other}' (lp or c0)"))),
    };
    let horizon = a.horizon.unwrap_or(100_000);
    let w = family.sequence()?;
    let r = check_w_conditions(&w, &cert, horizon, space)?;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for c in r.conditions() {
        rows.extend(sums_rows(c.name, &c.sums));
    }
    files.push(("w_partial_sums.csv".to_string(), csv_string(&["condition", "n", "partial_sum"], rows)?));
    let vector = match a.vector_stages {
        Some(stages) => {
            let v = build_w_vector(&w, &cert, &WVectorOptions { stages, ..Default::default() })?;
            Some(VectorOut {
                stages,
                shift: v.shift,
                support: v.u.len(),
                summands_disjoint: v.summands_disjoint,
                norm_pow: v.norm_pow,
                norm_pow_sum: v.norm_pow_sum,
                minus_ratio: v.minus_ratio,
            })
        }
        None => None,
    };
    let vector_ok = vector.as_ref().map_or(true, |v| v.summands_disjoint && v.minus_ratio <= 1.0);
    let report = WCertReport {
        command: "certify",
        timestamp: timestamp(),
        certificate: cert.label.clone(),
        family: family.name(),
        p: r.p,
        space: if space == Space::Lp { "lp" } else { "c0" },
        horizon_requested: r.horizon_requested,
        horizon_used: r.horizon_used,
        reindex_offset: r.reindex_offset,
        pass: r.pass && vector_ok,
        conditions: r
            .conditions()
            .iter()
            .map(|c| ConditionOut {
                name: c.name,
                trend: c.trend.name(),
                certified: c.certified,
                total: c.sums.total,
                ratio_decade: c.ratio_decade,
                ratio_century: c.ratio_century,
                note: c.note.clone(),
            })
            .collect(),
        vector,
    };
    Ok(Outcome { report: render(&report)?, files, pass: report.pass })
}

fn closedness(a: &CertifyArgs) -> Result<Outcome, Failure> {
    let desc = a.norms.as_deref().ok_or_else(|| usage("closedness needs --norms geometric:<base> or power:<s>"))?;
    let (kind, val) = desc.split_once(':').ok_or_else(|| usage(format!("bad --norms '{desc}'")))?;
    let val: f64 = val.parse().map_err(|_| usage(format!("bad number in --norms '{desc}'")))?;
    let norms = match kind {
        "geometric" => {
            if !(val > 1.0) {
                return Err(usage("geometric norms need a base above 1"));
            }
            // Σ_{n>=N} b^{-qn} = b^{-qN} / (1 - b^{-q})
            CoefSeq::from_fn(format!("{val}^n"), move |n| val.powf(n as f64))
                .with_tail(Arc::new(move |n, q| Tail::Bounded(val.powf(-q * n as f64) / (1.0 - val.powf(-q)))))
        }
        "power" => CoefSeq::power(val),
        other => return Err(usage(format!("unknown norm growth '{other}'"))),
    };
    let space = match a.norm_space.as_deref().unwrap_or("hilbert") {
        "hilbert" => SpaceKind::Hilbert,
        "banach" => SpaceKind::Banach,
        "lp" => SpaceKind::Lp(a.p.ok_or_else(|| usage("lp closedness needs --p"))?),
        other => return Err(usage(format!("unknown space '{other}'"))),
    };
    let horizon = a.horizon.unwrap_or(100_000);
    let v = closedness_certificate(&norms, space, horizon)?;
    let report = ClosednessReport {
        command: "certify",
        timestamp: timestamp(),
        norms: norms.label.clone(),
        space: format!("{space:?}").to_lowercase(),
        exponent: v.a,
        trend: v.series.trend.name(),
        certified: v.series.certified,
        partial_sum: v.series.sums.total,
        limit_bracket: v.series.limit_bracket,
        closed: v.closed,
    };
    let series = csv_string(&["series", "n", "partial_sum"], sums_rows("norm^-a", &v.series.sums))?;
    Ok(Outcome { report: render(&report)?, files: vec![("closedness_partial_sums.csv".into(), series)], pass: v.closed })
}

#[derive(Serialize)]
struct StageOut {
    stage: usize,
    eps: f64,
    k: String,
    j: String,
    m: String,
    max_b: f64,
    variation_bound: f64,
    joint_runs: usize,
    passed: bool,
}

#[derive(Serialize)]
struct CheckOut {
    stage: usize,
    name: String,
    kind: &'static str,
    value: f64,
    bound: f64,
    slack: f64,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct GramOut {
    d: f64,
    c: f64,
    target: f64,
    limit: f64,
    bound: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SampleOut {
    label: String,
    c1_constant: Option<f64>,
    divergence_trend: &'static str,
    partial_sum: f64,
    pass: bool,
    note: String,
}

#[derive(Serialize)]
struct DecayOut {
    stage: usize,
    j: String,
    max_abs: f64,
    at: String,
    spike: f64,
}

#[derive(Serialize)]
struct MeasureReport {
    command: &'static str,
    timestamp: u64,
    stages: usize,
    h_count: usize,
    delta: Vec<f64>,
    eps: Vec<f64>,
    blocks: u64,
    passed: bool,
    weakly_supercyclic: bool,
    weak_convergence_decreasing: bool,
    phi: Vec<(usize, usize)>,
    gram: GramOut,
    stage: Vec<StageOut>,
    checks: Vec<CheckOut>,
    samples: Vec<SampleOut>,
    decay: Vec<DecayOut>,
}

pub fn measure(a: &MeasureArgs) -> Result<Outcome, Failure> {
    let defaults = ConstructOptions::default();
    let stages = a.stages.unwrap_or(6);
    let h_count = a.h_count.unwrap_or(4);
    if stages == 0 || h_count == 0 {
        return Err(usage("--stages and --h-count must be at least 1"));
    }
    if !a.delta.is_empty() && a.delta.len() != stages {
        return Err(usage(format!("--delta needs {stages} values, got {}", a.delta.len())));
    }
    let opts = DriverOptions {
        h_count,
        stages,
        delta: a.delta.clone(),
        family_horizon: a.family_horizon.unwrap_or(100_000),
        construct: ConstructOptions {
            max_k_bits: a.max_k_bits.unwrap_or(defaults.max_k_bits),
            max_blocks: a.max_blocks.unwrap_or(defaults.max_blocks),
            ..defaults
        },
    };
    let r = rajchman_driver(&opts)?;
    let c = &r.construction;
    let mu = &c.measure;
    let checks: Vec<CheckOut> = c
        .checks()
        .map(|e| CheckOut {
            stage: e.stage,
            name: e.name.clone(),
            kind: e.kind.as_str(),
            value: e.value,
            bound: e.bound,
            slack: e.slack(),
            pass: e.pass,
            detail: e.detail.clone(),
        })
        .collect();
    let report = MeasureReport {
        command: "measure",
        timestamp: timestamp(),
        stages,
        h_count,
        delta: c.delta.clone(),
        eps: c.eps.clone(),
        blocks: mu.blocks(),
        passed: r.passed(),
        weakly_supercyclic: r.orbit.weakly_supercyclic,
        weak_convergence_decreasing: r.weak.all_decreasing(),
        phi: r.phi.clone(),
        gram: GramOut { d: r.gram.d, c: r.gram.c, target: r.gram_target, limit: GRAM_LIMIT, bound: r.gram.bound, pass: r.gram_pass },
        stage: c
            .states
            .iter()
            .map(|s| StageOut {
                stage: s.stage,
                eps: s.eps,
                k: s.k.to_string(),
                j: s.j.to_string(),
                m: s.m.to_string(),
                max_b: s.b.max_magnitude(),
                variation_bound: s.variation_bound,
                joint_runs: s.joint_runs,
                passed: s.passed(),
            })
            .collect(),
        checks,
        samples: r
            .orbit
            .samples
            .iter()
            .map(|s| SampleOut {
                label: s.label.clone(),
                c1_constant: s.c1_constant,
                divergence_trend: s.c2.trend.name(),
                partial_sum: s.c2.sums.total,
                pass: s.pass,
                note: s.note.clone(),
            })
            .collect(),
        decay: r
            .decay
            .iter()
            .map(|d| DecayOut { stage: d.stage, j: d.j.to_string(), max_abs: d.max_abs, at: d.at.to_string(), spike: d.spike })
            .collect(),
    };

    let mut files = Vec::new();
    let range = a.fourier_range.unwrap_or(100).max(0);
    let fourier_rows = (-range..=range).map(|k| {
        let v = mu.fourier(&BigInt::from(k));
        vec![k.to_string(), v.re.to_string(), v.im.to_string(), v.norm().to_string()]
    });
    files.push(("fourier.csv".into(), csv_string(&["k", "re", "im", "abs"], fourier_rows)?));
    let decay_rows = report.decay.iter().map(|d| vec![d.stage.to_string(), d.j.clone(), d.max_abs.to_string(), d.at.clone(), d.spike.to_string()]);
    files.push(("decay.csv".into(), csv_string(&["stage", "j", "max_abs", "at", "spike"], decay_rows)?));
    let check_rows = report.checks.iter().map(|e| {
        vec![e.stage.to_string(), e.name.clone(), e.kind.to_string(), e.value.to_string(), e.bound.to_string(), e.slack.to_string(), e.pass.to_string()]
    });
    files.push(("checks.csv".into(), csv_string(&["stage", "name", "kind", "value", "bound", "slack", "pass"], check_rows)?));
    let weak_rows = r.weak.rows.iter().map(|w| vec![(w.test + 1).to_string(), w.stage.to_string(), w.diff.to_string(), w.restricted.to_string()]);
    files.push(("weak_convergence.csv".into(), csv_string(&["h", "stage", "diff", "restricted_max"], weak_rows)?));
    if !a.no_measure_file {
        files.push(("measure.txt".into(), write_layered(mu)));
    }
    Ok(Outcome { report: render(&report)?, files, pass: report.passed })
}
