//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameters (N, M) or derived quantities are out of the supported range.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A multi-index or coefficient vector does not match the basis dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A numeric argument lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A convex-function specification or construction is invalid.
    #[error("invalid phi: {0}")]
    InvalidPhi(String),

    /// A textual spec (phi, scheme, sampler) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The requested operation is not available for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// JSON (de)serialization failure for state files or reports.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
