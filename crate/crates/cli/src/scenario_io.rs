//! Scenario file loading with parse and validation diagnostics.

use std::path::Path;

use screenbot_core::scenario::Scenario;

use crate::CliError;

/// Parse and validate a scenario file. Parse errors carry the TOML
/// diagnostic (line/column and field); validation errors name the field.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigIo {
        path: path.display().to_string(),
        source: e,
    })?;
    let scenario: Scenario = toml::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    scenario.validate().map_err(|e| CliError::Scenario {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(scenario)
}
