use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no data")]
    EmptyInput,

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("index {index} out of bounds for dimension {dim} (line {line})")]
    IndexOutOfBounds { index: u64, dim: u64, line: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector is identically zero")]
    ZeroVector,

    #[error("vector is empty")]
    EmptyVector,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is numerically rank deficient (column {column})")]
    RankDeficient { column: usize },

    #[error("QR iteration did not converge after {sweeps} sweeps on a {dim}x{dim} matrix")]
    NoConvergence { sweeps: usize, dim: usize },

    #[error("breakdown at step {step}")]
    Breakdown { step: usize },

    #[error("start vector spans a non-dominant invariant subspace (residual {residual:e})")]
    DegenerateStart { residual: f64 },

    #[error("invalid binary cache {path:?}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
