use thiserror::Error;

use crate::matfun::MatFunError;
use crate::models::ModelError;
use crate::sets::SetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error for discretization and transformation entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    MatFun(#[from] MatFunError),

    #[error(transparent)]
    Set(#[from] SetError),

    #[error(transparent)]
    Model(#[from] ModelError),

    /// The method cannot be applied to this system as given.
    #[error("method {method} is not applicable: {reason}")]
    Inapplicable { method: String, reason: String },

    /// A numeric argument is outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl Error {
    /// True when the error signals a violated method precondition
    /// (as opposed to malformed input or an I/O problem).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Inapplicable { .. }
                | Error::MatFun(MatFunError::CorrectionOrder { .. })
                | Error::InvalidArgument(_)
        )
    }
}
