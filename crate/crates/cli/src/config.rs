//! Command-line flags and the TOML config file that mirrors them.
//!
//! A config file has an optional `command` key and one table per command; flags given on the
//! command line override the file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "shiftlab", version, about = "Weighted shift criteria, weak-closure certificates and Rajchman measure constructions")]
pub struct Cli {
    /// TOML config file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for the report and CSV files; without it the report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Salas-type statistics of a weighted shift.
    Criteria(CriteriaArgs),
    /// W-condition certificates and closedness tests.
    Certify(CertifyArgs),
    /// Staged construction of a Rajchman measure.
    Measure(MeasureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Criteria(_) => "criteria",
            Command::Certify(_) => "certify",
            Command::Measure(_) => "measure",
        }
    }
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CriteriaArgs {
    /// unweighted, chan-sanders, nine-adic, nine-adic-inverse or triadic.
    #[arg(long)]
    pub family: Option<String>,
    /// Exponent for the triadic family.
    #[arg(long)]
    pub p: Option<f64>,
    /// hyper, super, simplified-hyper or simplified-super.
    #[arg(long)]
    pub stat: Option<String>,
    #[arg(long)]
    pub kmax: Option<u32>,
    #[arg(long)]
    pub horizon: Option<i64>,
    /// log2 of the tolerance below which a statistic counts as small.
    #[arg(long, allow_hyphen_values = true)]
    pub tol_log2: Option<f64>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CertifyArgs {
    /// log, nine-adic, nine-adic-inverse, triadic or closedness.
    #[arg(long)]
    pub cert: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Weight family for the W-conditions (default: the one the certificate is written for).
    #[arg(long)]
    pub family: Option<String>,
    /// lp or c0.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Also build the candidate vector with this many stages.
    #[arg(long)]
    pub vector_stages: Option<usize>,
    /// Norm growth for closedness: geometric:<base> or power:<s>.
    #[arg(long)]
    pub norms: Option<String>,
    /// Space for closedness: hilbert, lp or banach.
    #[arg(long)]
    pub norm_space: Option<String>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MeasureArgs {
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long)]
    pub h_count: Option<usize>,
    /// Comma-separated δ_1, …, δ_N (default 2^-n).
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub delta: Vec<f64>,
    #[arg(long)]
    pub max_k_bits: Option<u64>,
    #[arg(long)]
    pub max_blocks: Option<u64>,
    /// Horizon of the per-family divergence sums.
    #[arg(long)]
    pub family_horizon: Option<u64>,
    /// Fourier coefficients |k| <= this go to fourier.csv.
    #[arg(long)]
    pub fourier_range: Option<i64>,
    /// Skip writing the measure file.
    #[arg(long)]
    #[serde(default)]
    pub no_measure_file: bool,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub criteria: CriteriaArgs,
    #[serde(default)]
    pub certify: CertifyArgs,
    #[serde(default)]
    pub measure: MeasureArgs,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

impl CriteriaArgs {
    pub fn merged(&self, file: &CriteriaArgs) -> CriteriaArgs {
        CriteriaArgs {
            family: pick(&self.family, &file.family),
            p: pick(&self.p, &file.p),
            stat: pick(&self.stat, &file.stat),
            kmax: pick(&self.kmax, &file.kmax),
            horizon: pick(&self.horizon, &file.horizon),
            tol_log2: pick(&self.tol_log2, &file.tol_log2),
        }
    }
}

impl CertifyArgs {
    pub fn merged(&self, file: &CertifyArgs) -> CertifyArgs {
        CertifyArgs {
            cert: pick(&self.cert, &file.cert),
            p: pick(&self.p, &file.p),
            family: pick(&self.family, &file.family),
            space: pick(&self.space, &file.space),
            horizon: pick(&self.horizon, &file.horizon),
            vector_stages: pick(&self.vector_stages, &file.vector_stages),
            norms: pick(&self.norms, &file.norms),
            norm_space: pick(&self.norm_space, &file.norm_space),
        }
    }
}

impl MeasureArgs {
    pub fn merged(&self, file: &MeasureArgs) -> MeasureArgs {
        MeasureArgs {
            stages: pick(&self.stages, &file.stages),
            h_count: pick(&self.h_count, &file.h_count),
            delta: if self.delta.is_empty() { file.delta.clone() } else { self.delta.clone() },
            max_k_bits: pick(&self.max_k_bits, &file.max_k_bits),
            max_blocks: pick(&self.max_blocks, &file.max_blocks),
            family_horizon: pick(&self.family_horizon, &file.family_horizon),
            fourier_range: pick(&self.fourier_range, &file.fourier_range),
            no_measure_file: self.no_measure_file || file.no_measure_file,
        }
    }
}
