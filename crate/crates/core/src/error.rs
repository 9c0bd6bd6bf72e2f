//! Crate-wide error type.

/// Errors surfaced by model validation, solvers, and oracles.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Block index outside the `(n, m)` grid.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    /// Grid dimensions disagree between two objects.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inconsistent or incomplete configuration.
    #[error("config error: {0}")]
    Config(String),
    /// A brute-force sweep would exceed its evaluation guard.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    /// No feasible solution under the cumulative energy constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
