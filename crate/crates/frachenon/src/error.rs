use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violates an admissibility constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative scheme failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// A requested integral diverges for the given exponents.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    /// A data file could not be parsed.
    #[error("malformed profile data at line {line}: {message}")]
    ProfileFormat { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
