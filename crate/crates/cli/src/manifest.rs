use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

/// Provenance record written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub artifacts: Vec<String>,
    pub tool_version: String,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.into(),
            parameters,
            seed,
            artifacts: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            wall_time_seconds: 0.0,
        }
    }

    /// `<artifact>.manifest.json`
    pub fn path_for(artifact: &Path) -> PathBuf {
        let mut name = artifact.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        artifact.with_file_name(name)
    }

    /// Records the artifacts and elapsed time and writes the manifest next
    /// to the first artifact.
    pub fn finish(mut self, artifacts: &[PathBuf], started: Instant) -> Result<PathBuf> {
        self.artifacts = artifacts.iter().map(|p| p.display().to_string()).collect();
        self.wall_time_seconds = started.elapsed().as_secs_f64();
        let path = Self::path_for(&artifacts[0]);
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
