use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    /// Fully resolved configuration; feed the manifest back through `--config` to replay.
    pub config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }
}

/// Loads a `--config` file: either a bare config object or a manifest whose `config`
/// field is taken.
pub fn load_config_value(path: &Path, command: &str) -> Result<serde_json::Value> {
    let value: serde_json::Value = crate::formats::read_json(path)?;
    let is_manifest = value.get("command").is_some() && value.get("config").is_some();
    if !is_manifest {
        return Ok(value);
    }
    match value.get("command").and_then(|c| c.as_str()) {
        Some(c) if c == command => Ok(value["config"].clone()),
        other => Err(CliError::Config(format!("manifest is for command {other:?}, not {command:?}"))),
    }
}
