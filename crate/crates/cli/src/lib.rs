//! Scenario-driven front end for the qel engines.
//!
//! A scenario is a JSON document naming one engine (`kind`), its
//! `parameters`, an optional `grid`, a `seed` and an `output` block. Runs are
//! deterministic in (scenario, seed) and emit plot-ready CSV or JSON tables.

pub mod error;
pub mod runner;
pub mod scenario;
pub mod table;

use std::path::Path;

pub use error::CliError;
pub use runner::run;
pub use scenario::{parse_scenario, Format, Kind, Scenario};
pub use table::{emit, parse, ResultTable};

/// Read and validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scenario(&text).map_err(|e| e.in_file(&path.display().to_string()))
}
