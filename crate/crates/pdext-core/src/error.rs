//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation requested outside the domain of a function or table.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structurally invalid argument (non-symmetric interval, bad knots, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Missing or inconsistent numeric configuration (truncation radius, rule, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// Input data that cannot support the requested computation.
    #[error("data error: {0}")]
    Data(String),
    /// A numeric routine failed (factorization, eigensolver, non-finite values).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A quadratic form or matrix is numerically zero where rank is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
