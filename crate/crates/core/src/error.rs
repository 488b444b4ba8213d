use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),

    #[error("non-associative table: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },

    #[error("input is not a 2-cocycle: first violation at ({0}, {1}, {2})")]
    NotCocycle(usize, usize, usize),

    #[error("phase {angle} has no root of unity of order dividing {max_den} within {tol:e}")]
    Snap { angle: f64, max_den: u64, tol: f64 },

    #[error("classification failed: {0}")]
    Classification(String),

    #[error("symmetry broken for group element {element}: |eigenvalue| = {modulus}")]
    BrokenSymmetry { element: usize, modulus: f64 },

    #[error("matrix product state is not injective: {0}")]
    NonInjective(String),

    #[error("matrix product state must be canonicalized first")]
    NotCanonical,

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("resource guard exceeded: {0}")]
    Guard(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
