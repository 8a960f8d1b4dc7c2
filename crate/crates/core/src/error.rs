use thiserror::Error;

use crate::nonlinearity::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{t} is not a point of the time scale")]
    NotInTimeScale { t: f64 },

    #[error("invalid time scale: {0}")]
    InvalidTimeScale(String),

    #[error("time scale literal: {message} at byte {offset}")]
    TimeScaleSyntax { offset: usize, message: String },

    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("empty interior: the domain has no interior points")]
    EmptyInterior,

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("{source} at x = {point:?}")]
    EvalAt { point: Vec<f64>, source: EvalError },

    #[error("found only {found} of {wanted} eigenvalues before the scan limit")]
    InsufficientRoots { found: usize, wanted: usize },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown {kind} `{name}`; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}
