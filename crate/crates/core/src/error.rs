use thiserror::Error;

/// Errors surfaced at the data and precondition boundaries.
///
/// Structural misuse inside arithmetic (mixing elements of different
/// algebras, shape mismatches) panics, matching the convention of the
/// linear-algebra crates this library builds on; everything reachable
/// from file input or user-chosen ideals reports through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("operands belong to different dynamical systems")]
    SystemMismatch,

    #[error("corner constraint violated at entry ({i},{j}): residual {residual:.3e}")]
    CornerViolation { i: usize, j: usize, residual: f64 },

    #[error("ideal is not orthogonal to the kernel; shared blocks {0:?}")]
    NotOrthogonal(Vec<usize>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid representation: {0}")]
    InvalidRep(String),

    #[error("gauge parameter must lie on the unit circle, got modulus {0}")]
    NotUnimodular(f64),

    #[error("support cap of {cap} entries exceeded at power step k={k} ({nnz} entries)")]
    SupportCap { cap: usize, k: usize, nnz: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
