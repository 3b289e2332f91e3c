//! Error type shared across the crate.

use crate::hilbert::Shape;

/// Errors reported by constructors, validators, and iterative solves.
///
/// Shape mismatches inside hot operations (applying an operator to a vector
/// of the wrong shape, inner products of incompatible vectors) are contract
/// violations and panic with a descriptive message instead of returning a
/// variant of this enum.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: Shape, got: Shape },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("construction rejected: {0}")]
    Rejected(String),

    #[error(
        "iterative solve did not converge: residual {residual:.3e} after {iters} iterations \
         (required {required:.3e})"
    )]
    SolveFailed {
        residual: f64,
        required: f64,
        iters: usize,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn rejected(msg: impl Into<String>) -> Self {
        Error::Rejected(msg.into())
    }
}
