use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityDomain(f64),

    #[error("correlation {0} outside [-1, 1]")]
    CorrelationDomain(f64),

    #[error("invalid sector parameter: {0}")]
    InvalidParameter(String),

    #[error("target {target} outside the attainable range [{lower}, {upper}]")]
    FrechetBounds { target: f64, lower: f64, upper: f64 },

    #[error("invalid panel: {0}")]
    InvalidPanel(String),

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("series length mismatch: {0} != {1}")]
    LengthMismatch(usize, usize),

    #[error("series too short: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("non-finite value in input series")]
    NonFinite,

    #[error("grid is not a full factorial design: {0}")]
    NonFactorial(String),

    #[error("invalid study configuration: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
