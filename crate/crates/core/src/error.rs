use thiserror::Error;

use crate::space::Vector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {point} is outside the map's domain")]
    Domain { point: Vector },

    #[error("pair #{index} ({x}, {y}) is outside the map's domain")]
    PairOutsideDomain { index: usize, x: Vector, y: Vector },

    #[error("iterate #{index} ({point}) is outside the map's domain")]
    IterateOutsideDomain { index: usize, point: Vector },

    #[error("iteration diverged: iterate #{index} is not finite")]
    Divergence { index: usize },

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn condition(msg: impl Into<String>) -> Self {
        Error::InvalidCondition(msg.into())
    }
}
