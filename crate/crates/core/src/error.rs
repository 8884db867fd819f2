use thiserror::Error;

/// Errors raised by the frame routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    /// Malformed or inconsistent input (dimensions, weights, entries).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The quantity is undefined for the given argument (e.g. a zero test vector).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not Hermitian: defect {defect:e} exceeds tolerance {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    /// Not enough positive-weight points to host the requested construction.
    #[error("insufficient capacity: need effective dimension {required}, have {available}")]
    Capacity { required: usize, available: usize },

    /// A randomized construction exhausted its draw budget.
    #[error("generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, FrameError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(FrameError::DimensionMismatch { expected, found })
    }
}
