use thiserror::Error;

use crate::report::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    /// Dangling ids, duplicate ids, tables that do not type-check at all.
    #[error("structural error: {0}")]
    Structure(String),

    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("size guard: {what} has a search space of {space} candidates (bound {bound})")]
    SizeGuard {
        what: String,
        space: u128,
        bound: u128,
    },

    #[error("ill-typed pasting at {node}: {reason}")]
    IllTyped { node: String, reason: String },

    /// Data parsed fine but violates the laws of its kind.
    #[error("{kind} failed validation: {report}")]
    Invalid {
        kind: &'static str,
        report: ValidationReport,
    },

    /// A result that would contradict a theorem the engine relies on.
    #[error("engine defect: {0}")]
    Defect(String),

    #[error("fixture `{name}`: {reason}")]
    Fixture { name: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub fn unknown(kind: &'static str, id: impl Into<String>) -> Self {
        Error::UnknownId {
            kind,
            id: id.into(),
        }
    }

    pub fn defect(msg: impl Into<String>) -> Self {
        Error::Defect(msg.into())
    }

    /// True for errors that are about the shape of the input rather than its laws.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Error::Structure(_)
                | Error::UnknownId { .. }
                | Error::SizeGuard { .. }
                | Error::IllTyped { .. }
                | Error::Json(_)
                | Error::Fixture { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
