//! Crate-wide error type.

use crate::grid::GridSpec;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no such ancestor inside the top cube: cube at level {level}, requested {requested} generations up")]
    NoSuchAncestor { level: u32, requested: u32 },

    #[error("point lies outside the unit cube")]
    PointOutsideDomain,

    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(GridSpec, GridSpec),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("weight must be strictly positive and finite")]
    NonPositiveWeight,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient quadrature nodes")]
    InsufficientNodes,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
