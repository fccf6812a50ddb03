use thiserror::Error;

use crate::syntax::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("LTL model is not a chain: {0}")]
    ChainShape(String),
    #[error("vocabulary mismatch: {left:?} vs {right:?}")]
    VocabularyMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
    #[error("model is not serial: state `{0}` has no successor")]
    NonSerial(String),
    #[error("enumeration budget {0} exceeds the cap of {cap}", cap = crate::oracle::MAX_NEW_STATES)]
    Budget(usize),
    #[error("policy {policy} is not supported by {operation}")]
    Policy {
        policy: crate::models::ExtensionPolicy,
        operation: &'static str,
    },
    #[error("logic mismatch: model is {model}, requested {requested}")]
    LogicMismatch {
        model: crate::syntax::LogicId,
        requested: crate::syntax::LogicId,
    },
    #[error("tableau is in the wrong phase: {0}")]
    Phase(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
