//! Intent configuration: the built-in screening conversation plus loading
//! of user-provided intent files (TOML, same framing as scenario files).

use std::path::Path;

use screenbot_core::chat::{Intent, IntentSet};
use serde::Deserialize;

use crate::CliError;

pub const INTENTS_SCHEMA: &str = "intents/1";

/// The shipped screening conversation.
pub const DEFAULT_INTENTS_TOML: &str = include_str!("../data/intents.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntentFile {
    #[serde(default = "default_schema")]
    schema: String,
    intents: Vec<Intent>,
}

fn default_schema() -> String {
    INTENTS_SCHEMA.to_string()
}

fn parse(text: &str, origin: &str) -> Result<IntentSet, CliError> {
    let file: IntentFile = toml::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    if file.schema != INTENTS_SCHEMA {
        return Err(CliError::Parse {
            path: origin.to_string(),
            message: format!("unsupported schema `{}`, expected `{INTENTS_SCHEMA}`", file.schema),
        });
    }
    IntentSet::new(file.intents).map_err(|e| CliError::Intents {
        path: origin.to_string(),
        source: e,
    })
}

/// The built-in intent set. Infallible at runtime; covered by tests.
pub fn default_intents() -> IntentSet {
    parse(DEFAULT_INTENTS_TOML, "<built-in intents>").expect("built-in intents are valid")
}

pub fn load_intents(path: &Path) -> Result<IntentSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigIo {
        path: path.display().to_string(),
        source: e,
    })?;
    parse(&text, &path.display().to_string())
}
