use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A field value breaks a type invariant.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// An operation parameter is out of its allowed range.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The metric has no defined value for the given inputs.
    #[error("undefined {metric}: {reason}")]
    Undefined { metric: &'static str, reason: String },

    #[error("unknown reference: {0}")]
    Reference(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("feature file: {0}")]
    FeatureFormat(String),

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { what, reason: reason.into() }
    }

    pub(crate) fn param(reason: impl Into<String>) -> Self {
        Error::Parameter(reason.into())
    }

    pub(crate) fn shape(reason: impl Into<String>) -> Self {
        Error::Shape(reason.into())
    }
}
