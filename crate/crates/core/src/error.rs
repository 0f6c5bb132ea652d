//! Shared error type. Variants distinguish bad input data (files, labels,
//! mismatched shapes) from violated internal invariants so callers can map
//! them to different exit codes.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// I/O failure while touching `path`.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line of an input file did not parse; `line` is 1-based.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Structurally valid input that violates a documented precondition
    /// (unknown article, coverage gap, out-of-range parameter, ...).
    #[error("{0}")]
    InvalidInput(String),

    /// A model was applied to features built under a different schema.
    #[error("feature schema mismatch: model expects `{expected}`, got `{actual}`")]
    SchemaMismatch { expected: String, actual: String },

    /// Vector length disagreement (embeddings, parameter vectors).
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A bug: an invariant the library itself is responsible for broke.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by what the user fed in, false for bugs.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
