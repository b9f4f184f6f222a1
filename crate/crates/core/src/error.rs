use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("edge {edge} references undeclared vertex {vertex}")]
    DanglingEndpoint { edge: String, vertex: String },

    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: String },

    #[error("pattern {pattern}: unknown alias {alias}")]
    UnknownAlias { pattern: String, alias: String },

    #[error("pattern {pattern}: duplicate alias {alias}")]
    DuplicateAlias { pattern: String, alias: String },

    #[error("pattern {0} has no edges")]
    EmptyPattern(String),

    #[error("pattern {0} is not weakly connected")]
    Disconnected(String),

    #[error("malformed predicate atom: {0}")]
    MalformedPredicate(String),

    #[error("cannot compare {left} with {right} on key {key}")]
    IncomparableKinds {
        key: String,
        left: &'static str,
        right: &'static str,
    },

    #[error("invalid traversal order: {0}")]
    InvalidOrder(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("query {query}: view answer differs from base evaluation (views: {views})")]
    CorrectnessMismatch { query: String, views: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
