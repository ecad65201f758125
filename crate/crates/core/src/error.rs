use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by every engine in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("value {value} outside [{lo}, {hi}] for feature {feature}")]
    Range {
        value: f64,
        feature: usize,
        lo: f64,
        hi: f64,
    },

    #[error("degenerate feature `{0}`: zero spread")]
    DegenerateFeature(String),

    #[error("time step {dt} violates the stability bound; admissible dt <= {admissible}")]
    Stability { dt: f64, admissible: f64 },

    #[error("numerical failure at step {step}: {msg}")]
    Numerical { step: usize, msg: String },

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
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
