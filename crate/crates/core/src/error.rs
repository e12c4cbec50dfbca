use thiserror::Error;

use crate::primitives::Party;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("setting `{label}` has no angle but the {model} model is angle-parameterized")]
    MissingAngle { label: String, model: &'static str },

    #[error("setting `{label}` belongs to the wrong party (expected {expected:?})")]
    WrongParty { label: String, expected: Party },

    #[error("the {0} model is not angle-parameterized")]
    NotAngleParameterized(&'static str),

    #[error("invalid joint distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no trials match setting pair {0}")]
    EmptySelection(String),

    #[error("malformed ensemble data: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
