use thiserror::Error;

/// A structure-constant index triple `(i, j, k)` naming `γ^k_{ij}`.
pub type Triple = (usize, usize, usize);

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("singular basis matrix (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("degenerate adapted transform: {0}")]
    DegenerateTransform(String),

    #[error("tensor is not in central-extension shape; offending entries (i,j,k): {offending:?}")]
    Shape { offending: Vec<Triple> },

    #[error("canonicalization failed in {subset}: best residual {residual:e} after {attempts} attempts")]
    Canonicalization {
        subset: String,
        residual: f64,
        attempts: usize,
    },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
