use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degenerate partition: side {side} has no divisor in [2, {requested}]")]
    DegeneratePartition { side: usize, requested: usize },

    #[error("grid spacing {h} is not finer than the unit lattice of bumps")]
    Resolution { h: f64 },

    #[error("bump profile does not cover the box: min coverage {min_coverage} at grid point {index}")]
    Covering { min_coverage: f64, index: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid interval ({a}, {b}]")]
    Interval { a: f64, b: f64 },

    #[error("matrix of size {n} exceeds the dense oracle cap {cap}")]
    OracleSize { n: usize, cap: usize },

    #[error("numerical failure: {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("empty ensemble: {0}")]
    EmptyEnsemble(String),

    #[error("volume normalization must be positive, got {0}")]
    Scale(f64),

    #[error("energies coincide (E = E' = {0}); disjointness scale undefined")]
    DisjointnessUndefined(f64),

    #[error("insufficient design: {0}")]
    InsufficientDesign(String),

    #[error("{excluded} of {total} trials excluded after numerical failures")]
    Exclusions { excluded: usize, total: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
