//! `manifest.json`: what ran, with which configuration and inputs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Config;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub config_file: Option<String>,
    pub config: Config,
    pub seed: u64,
    pub threads: Option<usize>,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
    /// Assumptions made during the run, e.g. `floor=assumed-flat`.
    pub notes: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn sha256_file(path: &Path) -> anyhow::Result<InputRecord> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InputRecord {
        path: path.display().to_string(),
        sha256: Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect(),
        bytes: bytes.len() as u64,
    })
}

impl Manifest {
    pub fn new(
        command: &str,
        argv: Vec<String>,
        config: &Config,
        config_file: Option<&PathBuf>,
        threads: Option<usize>,
    ) -> Self {
        Self {
            tool: "lma".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            argv,
            config_file: config_file.map(|p| p.display().to_string()),
            config: config.clone(),
            seed: config.seed,
            threads,
            inputs: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
            started_at: now(),
            finished_at: String::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> anyhow::Result<()> {
        self.inputs.push(sha256_file(path)?);
        Ok(())
    }

    pub fn write(mut self, dir: &Path) -> anyhow::Result<()> {
        self.finished_at = now();
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
