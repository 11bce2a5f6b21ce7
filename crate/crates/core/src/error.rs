use thiserror::Error;

use crate::treedec::Violation;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("unknown label {0}")]
    Lookup(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("layer layout error: {0}")]
    Layout(String),

    #[error("node {node} is not redundant: {reason}")]
    Redundancy { node: usize, reason: String },

    #[error("invalid tree decomposition: {0}")]
    Validation(Violation),

    #[error("table ordering error: {0}")]
    Ordering(String),

    #[error("photon collision: mode {0} already occupied")]
    Collision(usize),

    #[error("degenerate distribution: all weights are zero")]
    DegenerateDistribution,

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("kernels disagree: {0}")]
    Disagreement(String),

    #[error("i/o error: {0}")]
    Io(String),
}
