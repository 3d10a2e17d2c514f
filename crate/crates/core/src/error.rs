//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("su(n) needs n >= 2, got {0}")]
    InvalidRank(usize),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("matrix is not in the Lie algebra (hermitian part {herm:e}, trace {trace:e})")]
    NotInAlgebra { herm: f64, trace: f64 },
    #[error("matrix is not in the group (unitarity defect {unitary:e}, det defect {det:e})")]
    NotInGroup { unitary: f64, det: f64 },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("form degree {0} out of range")]
    DegreeOverflow(usize),
    #[error("wrong form degree: expected {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("contact volume degenerates for d = 0")]
    DegenerateContact,
    #[error("decode error: {0}")]
    Decode(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Result alias.
pub type Result<T> = std::result::Result<T, Error>;
