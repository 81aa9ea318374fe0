use std::path::PathBuf;

use thiserror::Error;

use crate::config::Command;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("PARSE_ERROR: {}:{line}:{column}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error("VALIDATION_ERROR: {} has {} problem(s):\n  - {}", path.display(), violations.len(), violations.join("\n  - "))]
    Validation { path: PathBuf, violations: Vec<String> },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{command} (config {}): {source}", config.display())]
    Run {
        command: Command,
        config: PathBuf,
        #[source]
        source: gcs::Error,
    },
}

impl CliError {
    /// 2 for domain errors raised by the numerics, 1 for everything the
    /// user can fix by editing the invocation or the config.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run { source, .. } if source.is_domain() => 2,
            _ => 1,
        }
    }
}
