use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point id {id} is outside the domain of {domain_len} points")]
    DomainMismatch { id: usize, domain_len: usize },

    #[error("concept index {index} is outside a class of {class_len} concepts")]
    ConceptIndex { index: usize, class_len: usize },

    #[error("labeling has length {got}, domain has {expected} points")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid restriction: {0}")]
    InvalidRestriction(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("estimated {estimate} bit-operations exceeds the budget of {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },

    #[error("width schedule rejected: {0}")]
    Schedule(String),

    #[error("class carries no {0} metadata")]
    MissingMeta(&'static str),

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
