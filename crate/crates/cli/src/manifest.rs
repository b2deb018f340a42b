//! Output directory handling and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// The bound `value` is compared against (meaning depends on the check).
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub started: String,
    pub finished: String,
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<Check>,
    pub status: String,
}

pub struct Run {
    dir: PathBuf,
    command: String,
    started: String,
    artifacts: Vec<Artifact>,
    checks: Vec<Check>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl Run {
    pub fn new(dir: &Path, command: &str) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.into(),
            started: now(),
            artifacts: Vec::new(),
            checks: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.artifacts.push(Artifact {
            path: name.into(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Records `value <= bound`.
    pub fn check_le(&mut self, name: &str, value: f64, bound: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            bound,
            pass: value <= bound,
        });
    }

    /// Records a boolean invariant.
    pub fn check(&mut self, name: &str, pass: bool) {
        let v = f64::from(u8::from(pass));
        self.checks.push(Check {
            name: name.into(),
            value: v,
            bound: 1.0,
            pass,
        });
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// Writes `manifest.json`; returns the names of failed checks.
    pub fn finish<C: Serialize>(self, config: &C, seeds: Vec<u64>) -> CliResult<Vec<String>> {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect();
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            config: serde_json::to_value(config).expect("config serializes"),
            seeds,
            started: self.started,
            finished: now(),
            artifacts: self.artifacts,
            checks: self.checks,
            status: if failed.is_empty() {
                "ok".into()
            } else {
                "tolerance-failure".into()
            },
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(self.dir.join("manifest.json"), text)?;
        Ok(failed)
    }
}
