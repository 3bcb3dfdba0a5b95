use std::time::Duration;

use thiserror::Error;

use crate::nagata::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("r = {0} is outside the supported range 3..=8")]
    RankOutOfRange(i64),

    #[error("lattice context mismatch: r = {left} vs r = {right}")]
    ContextMismatch { left: u8, right: u8 },

    #[error("{0} is not a (-2)-class")]
    NotARoot(String),

    #[error("{0} is not an exceptional class")]
    NotExceptional(String),

    #[error("Weyl orbit exceeded the cap of {0} elements")]
    OrbitCap(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point configuration is not in general position: {0}")]
    Degenerate(Violation),

    #[error("point configuration has not been validated")]
    NotValidated,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("time box of {0:?} exceeded")]
    TimeBox(Duration),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
