use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("generator {name} outside alphabet (d = {d}, q = {q})")]
    AlphabetBounds { name: String, d: usize, q: usize },

    #[error("coefficient algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("covariance is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("no convergence after {iterations} iterations: {msg}")]
    NoConvergence { iterations: usize, msg: String },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("bound violated: {0}")]
    BoundViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
