//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by configuration, contract, and resource checks.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid system parameters (bad M, n_T, missing angle, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Caller broke an argument contract (wrong bit length, shape mismatch).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A size cap was exceeded (codebook enumeration, pair table).
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
