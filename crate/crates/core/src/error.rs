use thiserror::Error;

/// Errors produced by the filter design, series, and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("SMA order must be at least 1")]
    ZeroOrder,

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("design infeasible for {spec}: constraint matrix is singular")]
    DesignInfeasible { spec: String },

    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("duplicate observation for period {period}, end year {year}")]
    DuplicateKey { period: u32, year: i32 },

    #[error("line {line}: unknown period {value:?}")]
    UnknownPeriod { line: u64, value: String },

    #[error("no observations")]
    Empty,

    #[error("series mismatch: {0}")]
    SeriesMismatch(String),

    #[error("missing observations: {}", format_missing(.0))]
    MissingObservations(Vec<(u32, i32)>),

    #[error("observation ({period}, {year}) is already present; refusing to overwrite")]
    AlreadyPresent { period: u32, year: i32 },

    #[error("cannot impute ({period}, {year}): {reason}")]
    InsufficientAnchors {
        period: u32,
        year: i32,
        reason: String,
    },

    #[error("logarithm domain error: {0}")]
    Domain(String),

    #[error("no valid time points for period {0}")]
    NoTimePoints(u32),

    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("reference value is zero; discrepancy undefined")]
    ZeroReference,

    #[error("invalid simulation: {0}")]
    InvalidSimulation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_missing(keys: &[(u32, i32)]) -> String {
    keys.iter()
        .map(|(k, t)| format!("({k}y, {t})"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
