use serde_json::{json, Value};

/// Errors that end an invocation. Invalid input exits with 2; a core error
/// that is itself a failed property (a disagreeing cross-check, a map with
/// no dagger) exits with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Validation {
        line: usize,
        #[source]
        source: oakit_core::Error,
    },
    #[error("{0}")]
    Core(#[from] oakit_core::Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Resolve(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(oakit_core::Error::CrossCheck(_))
            | CliError::Core(oakit_core::Error::NotSymmetrizable { .. }) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } | CliError::Core(_) => "validation",
            CliError::Io { .. } => "io",
            CliError::Resolve(_) => "resolve",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self) -> Value {
        let line = match self {
            CliError::Parse { line, .. } | CliError::Validation { line, .. } => Some(*line),
            _ => None,
        };
        json!({ "error": self.kind(), "message": self.to_string(), "line": line })
    }
}
