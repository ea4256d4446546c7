use thiserror::Error;

use crate::graph::Violation;

/// Syntax error in a name, path, or dynamics string, with a byte offset.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        Self { position, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid configuration: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("{step} requires at least {required} layers, configuration has {actual}")]
    Layers { step: String, required: usize, actual: usize },

    #[error("{0}")]
    Domain(String),

    #[error("rejection sampling gave up after {0} attempts")]
    RejectionBudget(usize),

    #[error("enumeration of {states} states exceeds the budget of {budget}")]
    EnumerationBudget { states: u128, budget: u128 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid rule table: {0}")]
    RuleTable(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
