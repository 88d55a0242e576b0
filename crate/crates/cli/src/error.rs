use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The scenario document or its parameters are invalid.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("{0}")]
    Numerical(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    /// A result table could not be re-read.
    #[error("malformed table: {0}")]
    Table(String),
}

impl CliError {
    pub fn validation(path: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation { path: path.into(), message: message.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Engine failure during a run, with the offending scenario named.
    pub fn from_engine(context: &str, err: qel_core::Error) -> Self {
        if err.is_numerical() {
            CliError::Numerical(format!("{context}: {err}"))
        } else {
            CliError::validation(context, err)
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Table(_) => 1,
        }
    }

    /// Prefix the path with the scenario it came from.
    pub fn in_file(self, file: &str) -> Self {
        match self {
            CliError::Validation { path, message } => CliError::Validation { path: format!("{file}: {path}"), message },
            CliError::Numerical(msg) => CliError::Numerical(format!("{file}: {msg}")),
            other => other,
        }
    }
}
