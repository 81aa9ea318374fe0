//! Batch front-end for the `gcs` coherent-state toolkit: parse a run
//! configuration, dispatch to the library and emit reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::Path;

pub use commands::{execute, Payload};
pub use config::{parse_config, Command, RunConfig};
pub use error::CliError;
pub use report::{Format, Report};

/// Parses, validates and runs `config_path` for `command`.
pub fn run(command: Command, config_path: &Path) -> Result<Report, CliError> {
    let config = parse_config(config_path, command)?;
    let base = config::base_dir(config_path);
    let result = execute(command, &config, base).map_err(|source| CliError::Run {
        command,
        config: config_path.to_path_buf(),
        source,
    })?;
    Ok(Report::new(command, config, result))
}
