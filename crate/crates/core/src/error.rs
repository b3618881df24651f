use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid block structure: {0}")]
    InvalidBlocks(String),

    #[error("invalid beta parameters: {0}")]
    InvalidBetas(String),

    /// Rate prediction is only established for non-negative exponents.
    #[error("beta parameter {value} at block {index} is negative; rate prediction requires beta >= 0")]
    NegativeBeta { index: usize, value: f64 },

    #[error("degenerate input: points span an affine subspace of dimension {rank} < {dim}")]
    DegenerateInput { rank: usize, dim: usize },

    #[error("need at least {needed} points in dimension {dim}, got {actual}")]
    TooFewPoints { needed: usize, dim: usize, actual: usize },

    #[error("brute-force facet enumeration is limited to {limit} points, got {actual}")]
    TooManyPoints { limit: usize, actual: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    NonConvergence { estimate: f64, error: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}
