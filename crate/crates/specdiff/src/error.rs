use std::path::PathBuf;

/// Errors produced by validation, ingestion, simulation, and inference.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("series '{label}' has {n} observations, need at least {min}")]
    TooShort { label: String, n: usize, min: usize },

    #[error("series '{label}' contains a non-finite value at index {index}")]
    NonFinite { label: String, index: usize },

    #[error("series '{label}' is constant; its periodogram is degenerate")]
    Constant { label: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("variance estimate is zero: {0}")]
    DegenerateVariance(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("insufficient innovations: need at least {needed}, got {got}")]
    InsufficientInnovations { needed: usize, got: usize },

    #[error("model {0} is nonstationary and has no spectral density")]
    Nonstationary(String),

    #[error("cell {cell}, replication {rep}: {source}")]
    Replication {
        cell: String,
        rep: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
