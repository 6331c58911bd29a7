//! Run manifests: every command writes one before its outputs, and every
//! output file references the manifest hash.
//!
//! The hash covers command, tool version, seed and the resolved
//! configuration; execution details (thread count, paths, timestamps) are
//! excluded, so reruns of the same experiment hash identically.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub manifest_hash: String,
    pub started_at_unix: u64,
    pub finished_at_unix: Option<u64>,
    pub outputs: Vec<String>,
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn manifest_hash(command: &str, seed: u64, config: &serde_json::Value) -> String {
    let core = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": config,
    });
    let bytes = serde_json::to_vec(&core).expect("hashable manifest core");
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value, outputs: Vec<String>) -> Self {
        let manifest_hash = manifest_hash(command, seed, &config);
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            manifest_hash,
            started_at_unix: now_unix(),
            finished_at_unix: None,
            outputs,
        }
    }

    pub fn path(dir: &Path) -> PathBuf {
        dir.join("manifest.json")
    }

    /// Writes the manifest (before any other output).
    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(Self::path(dir), text + "\n")
            .with_context(|| format!("writing manifest into {}", dir.display()))
    }

    /// Marks completion and rewrites the manifest.
    pub fn finish(mut self, dir: &Path) -> Result<()> {
        self.finished_at_unix = Some(now_unix());
        self.write(dir)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(Self::path(dir))
            .with_context(|| format!("reading manifest from {}", dir.display()))?;
        serde_json::from_str(&text).context("parsing manifest.json")
    }
}
