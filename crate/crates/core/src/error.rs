use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Class indices inside error payloads are 1-based, matching everything a
/// user sees on the command line and in files.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("class count must be at least 2, got {0}")]
    InvalidClassCount(usize),

    #[error("{name} must lie in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("row {row} has invalid entry {value} in column {col}")]
    InvalidEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, expected 1")]
    NotRowStochastic { row: usize, sum: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not on the probability simplex ({reason})")]
    OffSimplex { reason: String },

    #[error("noise channel is singular (|det| = {det:e})")]
    SingularChannel { det: f64 },

    #[error("noise level {alpha} is at or above the breakdown threshold {threshold} for K = {k}")]
    AboveThreshold { alpha: f64, k: usize, threshold: f64 },

    #[error("label {label} at position {index} is outside 1..={k}")]
    LabelOutOfRange { index: usize, label: usize, k: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("training diverged at epoch {epoch}, batch {batch}: loss is {loss}")]
    TrainingDiverged { epoch: usize, batch: usize, loss: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }
}
