use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::FullConfig;
use crate::util::write_atomic;

/// Everything needed to reproduce a run bit-exactly, plus bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub mode: Vec<String>,
    pub seeds: Vec<u64>,
    /// Full effective configuration snapshot.
    pub config: FullConfig,
    /// Output files, relative to the manifest's directory.
    pub artifacts: Vec<String>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        mode: Vec<String>,
        seeds: Vec<u64>,
        config: &FullConfig,
    ) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            mode,
            seeds,
            config: config.clone(),
            artifacts: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    pub fn add_artifact(&mut self, out_dir: &Path, path: &Path) {
        let rel = path
            .strip_prefix(out_dir)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned();
        self.artifacts.push(rel);
    }

    /// Verify every declared artifact exists, then write the manifest.
    pub fn finalize(mut self, out_dir: &Path, wall_clock_s: f64) -> anyhow::Result<PathBuf> {
        self.wall_clock_s = wall_clock_s;
        self.artifacts.sort();
        for artifact in &self.artifacts {
            let path = out_dir.join(artifact);
            if !path.exists() {
                anyhow::bail!("declared artifact missing: {}", path.display());
            }
        }
        let path = out_dir.join("manifest.json");
        write_atomic(&path, serde_json::to_string_pretty(&self)?.as_bytes())?;
        Ok(path)
    }
}
