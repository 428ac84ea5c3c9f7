//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Hermitian symmetry violated: max asymmetry {max_asymmetry:.3e} exceeds {tolerance:.3e}")]
    HermitianViolation { max_asymmetry: f64, tolerance: f64 },

    #[error("zero-mean precondition violated: |coeff(0)| = {residual:.3e}")]
    NonzeroMean { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("time step failed at t = {t}: {detail}")]
    StepFailure { t: f64, detail: String },

    #[error("Picard grid mismatch: candidate has {got} nodes, expected {expected}")]
    NodeGridMismatch { expected: usize, got: usize },

    #[error("snapshot header malformed: {0}")]
    MalformedHeader(String),

    #[error("snapshot payload truncated: expected {expected} bytes, got {got}")]
    PayloadLength { expected: usize, got: usize },

    #[error("snapshot format version {got} unsupported (expected {expected})")]
    VersionMismatch { expected: u32, got: u32 },

    #[error("diagnostics records not monotone in t at index {index}")]
    NonMonotoneTime { index: usize },

    #[error("empty record set")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
