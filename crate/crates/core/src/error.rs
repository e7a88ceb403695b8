use crate::graph::{GraphModel, Vertex};
use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// `Domain` covers violated mathematical preconditions (zero weights,
/// exponents out of range, unsupported parameter combinations); `Parse`
/// covers malformed textual input (JSON vectors, CSV tables, CLI
/// grammars). Callers that need to distinguish usage mistakes from
/// domain failures can match on the variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} is not admissible in {model}")]
    InadmissibleVertex { model: GraphModel, vertex: Vertex },

    #[error("model mismatch: expected {expected}, found {found}")]
    ModelMismatch {
        expected: GraphModel,
        found: GraphModel,
    },

    #[error("{operation} is not supported on {model}")]
    UnsupportedModel {
        model: GraphModel,
        operation: &'static str,
    },

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for a domain-precondition failure.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Shorthand for a malformed-input failure.
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
