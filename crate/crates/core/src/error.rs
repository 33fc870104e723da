use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("multiplier undefined at xi = {xi}")]
    UndefinedMultiplier { xi: f64 },
    #[error("aliasing: {0}")]
    Aliasing(String),
    #[error("field is not mean-zero (mean = {mean:e})")]
    NotMeanZero { mean: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },
    #[error("quadrature under-resolved: {0}")]
    UnderResolved(String),
    #[error("wrap-around contamination {mass:e} exceeds tolerance")]
    WrapContamination { mass: f64 },
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
