use thiserror::Error;

/// Errors raised by the algebra, representation and sweep layers.
#[derive(Debug, Error)]
pub enum WeylError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid semi-norm: {0}")]
    InvalidSeminorm(String),

    #[error("measures live on different spaces")]
    SpaceMismatch,

    #[error("atom {coord:?} is not on the density lattice (stride {stride:?})")]
    OffLattice { coord: Vec<i64>, stride: Vec<i64> },

    #[error("density grids are incompatible: {0}")]
    GridMismatch(String),

    #[error("hbar outside the admissible domain: {0}")]
    HbarDomain(String),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("moment condition failed: {0}")]
    MomentFailure(String),

    #[error("power iteration did not converge after {iterations} iterations (best estimate {best})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
}

impl WeylError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        WeylError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, WeylError>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(WeylError::DimensionMismatch { expected, got });
    }
    Ok(())
}
