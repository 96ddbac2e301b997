use std::path::Path;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;

mod commands;
mod config;

use config::{Cli, Command, ConfigFile};

/// Thread count for the data-parallel parts; unset means one per core.
const THREADS_VAR: &str = "SHIFTLAB_THREADS";

/// What went wrong, mapped onto the exit codes 2 (usage or config) and 3 (internal check).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl From<shiftlab::Error> for Failure {
    fn from(e: shiftlab::Error) -> Failure {
        use shiftlab::Error as E;
        match e {
            E::Domain(_) | E::Parse { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

/// A finished run: the report and its CSV series, plus whether the certificate held.
pub struct Outcome {
    pub report: String,
    pub files: Vec<(String, String)>,
    pub pass: bool,
}

pub fn render<T: Serialize>(report: &T) -> Result<String, Failure> {
    toml::to_string(report).map_err(|e| Failure::Internal(format!("report serialization: {e}")))
}

pub fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn write_outputs(dir: &Path, out: &Outcome) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
    };
    write("report.toml", &out.report)?;
    for (name, body) in &out.files {
        write(name, body)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().map_err(|_| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    }
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p).map_err(Failure::Usage)?,
        None => ConfigFile::default(),
    };
    let command = match (&cli.command, file.command.as_deref()) {
        (Some(c), _) => c.clone(),
        (None, Some("criteria")) => Command::Criteria(Default::default()),
        (None, Some("certify")) => Command::Certify(Default::default()),
        (None, Some("measure")) => Command::Measure(Default::default()),
        (None, Some(other)) => return Err(Failure::Usage(format!("unknown command '{other}' in config"))),
        (None, None) => return Err(Failure::Usage("no command given (criteria, certify or measure)".into())),
    };
    if let (Some(c), Some(fc)) = (&cli.command, file.command.as_deref()) {
        if c.name() != fc {
            return Err(Failure::Usage(format!("config is for '{fc}' but the command is '{}'", c.name())));
        }
    }
    let outcome = match command {
        Command::Criteria(a) => commands::criteria(&a.merged(&file.criteria))?,
        Command::Certify(a) => commands::certify(&a.merged(&file.certify))?,
        Command::Measure(a) => commands::measure(&a.merged(&file.measure))?,
    };
    match cli.out.or(file.out) {
        Some(dir) => write_outputs(&dir, &outcome)?,
        None => print!("{}", outcome.report),
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("check violation: {m}");
            ExitCode::from(3)
        }
    }
}
