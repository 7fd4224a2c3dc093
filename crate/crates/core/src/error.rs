use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by tree fitting, evaluation and the data pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at row {row}, column {column}")]
    NonFinite { row: usize, column: usize, value: f64 },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },

    #[error("model file: {0}")]
    ModelFile(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("missing dataset file {path}: {hint}")]
    MissingDataset { path: PathBuf, hint: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn empty(msg: impl Into<String>) -> Self {
        Error::Empty(msg.into())
    }

    /// True for errors caused by the contents of input data rather than by
    /// how the library was called.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::Empty(_)
                | Error::Csv { .. }
                | Error::BadRow { .. }
                | Error::ModelFile(_)
                | Error::MissingDataset { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::DimensionMismatch { .. }
        )
    }
}
