//! Library half of the `pfqn` command: file formats and subcommand logic.

pub mod commands;
pub mod docs;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Document(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] pfqn::Error),
}

/// Machine-readable error report written to standard error.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub message: String,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Document(_) => "document",
            CliError::Usage(_) => "usage",
            CliError::Library(e) => match e {
                pfqn::Error::Range { .. } => "range",
                pfqn::Error::Shape(_) => "shape",
                pfqn::Error::SelfSignaling { .. } => "self_signaling",
                pfqn::Error::TooLarge { .. } => "too_large",
                pfqn::Error::Inconsistent(_) => "inconsistent",
                pfqn::Error::InvalidProcess(_) => "invalid_process",
                pfqn::Error::NotABasis { .. } => "not_a_basis",
                pfqn::Error::Ambiguous(_) => "ambiguous",
                pfqn::Error::Labels(_) => "labels",
                pfqn::Error::Unitaries(_) => "unitaries",
                pfqn::Error::RetriesExhausted(_) => "retries_exhausted",
                pfqn::Error::UnknownEntry(_) => "unknown_entry",
            },
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            error: self.kind(),
            message: self.to_string(),
        }
    }
}
