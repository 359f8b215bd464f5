//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by statistical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (a probability outside (0,1), a negative threshold, an index out of
    /// range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data: empty samples, dimension mismatches,
    /// non-finite observations.
    #[error("invalid input: {0}")]
    Input(String),

    /// An objective function returned a non-finite value during
    /// optimization.
    #[error("non-finite objective value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
