use thiserror::Error;

/// Errors produced by algebra construction, frame computation and the
/// deformation engine.
#[derive(Debug, Error)]
pub enum CheegerError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: String },

    #[error("deformation parameter t = {t} outside validity range (t > {t_min})")]
    OutsideValidity { t: f64, t_min: f64 },

    #[error("degenerate plane: input vectors are linearly dependent")]
    DegeneratePlane,

    #[error("argument is not horizontal (residual {residual:.3e})")]
    NotHorizontal { residual: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, CheegerError>;
