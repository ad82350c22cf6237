//! Configuration-driven front end for the `multitime` library.

pub mod config;
pub mod error;
pub mod output;
pub mod resolve;
pub mod tasks;

use std::path::Path;

pub use config::{OutputFormat, RunConfig, TaskKind};
pub use error::{CliError, CliResult};

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        context: format!("cannot read config {}", path.display()),
        source,
    })?;
    RunConfig::from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Runs the task and writes its output; returns the rendered text.
pub fn run(config: &RunConfig) -> CliResult<String> {
    let outcome = tasks::execute(config)?;
    let text = outcome.table.render(config.output.format);
    match &config.output.path {
        Some(path) => output::write_atomic(Path::new(path), &text)?,
        None => print!("{text}"),
    }
    if outcome.failed.is_empty() {
        Ok(text)
    } else {
        Err(CliError::CriteriaFailed(outcome.failed))
    }
}
