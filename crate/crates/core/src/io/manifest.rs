//! `manifest.toml`: the configuration that produced a run plus its outcome.
//!
//! The `[config]` table re-parses as a run configuration, so a manifest is enough
//! to repeat the run.

use super::config::RunConfig;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSummary {
    /// `converged`, `max-iterations` or `diverged`.
    pub status: String,
    pub iterations: usize,
    pub final_residual: f64,
    pub initial_residual: [f64; 5],
    pub threads: usize,
    pub wall_seconds: f64,
    pub crate_version: String,
    /// Files written next to the manifest.
    pub files: Vec<String>,
    /// Solver failure or divergence message, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub config: RunConfig,
    pub run: RunSummary,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let s = toml::to_string(self)
            .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
        std::fs::write(path, s)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        toml::from_str(&s).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
