use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fermion space with {levels} levels cannot hold {particles} particles")]
    FermionOverfill { levels: usize, particles: usize },

    #[error("invalid occupation vector {occupations:?}: {reason}")]
    InvalidOccupation {
        occupations: Vec<u8>,
        reason: &'static str,
    },

    #[error("particle count mismatch: {0}")]
    ParticleMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid ensemble configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot summarize an empty set of records")]
    EmptyRecords,

    #[error("benchmark {0} outside (0, 1)")]
    InvalidBenchmark(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: malformed row: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config {path}: {reason}")]
    ConfigFile { path: PathBuf, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
