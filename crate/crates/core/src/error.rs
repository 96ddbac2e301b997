use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("support collision at index {index} between summands {first} and {second}")]
    SupportCollision { index: i128, first: usize, second: usize },
    #[error("search exhausted up to {kmax}: best k = {best_k} with defect {defect:.3e}")]
    SearchExhausted { kmax: u64, best_k: u64, defect: f64 },
    #[error("check failed at stage {stage}: {what}")]
    CheckFailed { stage: usize, what: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
