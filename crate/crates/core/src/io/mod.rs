//! Canonical serialization, configuration hashes and run manifests.
//!
//! JSON objects are emitted with sorted keys (serde_json's default map is a
//! `BTreeMap`), and floats use the shortest representation that parses back
//! to the same bits, so identical inputs give byte-identical files.

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Compact JSON with sorted keys.
pub fn canonical_json(v: &Value) -> String {
    serde_json::to_string(v).expect("a Value always serializes")
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn pretty_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("a Value always serializes");
    s.push('\n');
    s
}

/// First 64 bits of SHA-256 over the canonical JSON, as 16 hex digits.
pub fn config_hash(config: &Value) -> String {
    let digest = Sha256::digest(canonical_json(config).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A table of named float columns.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Provenance of one command invocation: the outputs it wrote and the
/// configuration needed to reproduce them.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn start(command: &str, config: Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.into(),
            config_hash: config_hash(&config),
            config,
            seed,
            tool_version: TOOL_VERSION.into(),
            started_unix: unix_now(),
            finished_unix: 0.0,
            outputs: vec![],
        }
    }

    /// Writes `contents` under `dir` and records the file name.
    pub fn emit(&mut self, dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
        let path = dir.join(name);
        write_file(&path, contents)?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    /// Stamps the finish time and writes `manifest.json` next to the outputs.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_unix = unix_now();
        let v = serde_json::to_value(&self).map_err(|e| Error::Io(e.to_string()))?;
        let path = dir.join("manifest.json");
        write_file(&path, &pretty_json(&v))?;
        Ok(path)
    }

    /// The reference every output file carries back to its manifest.
    pub fn reference(&self) -> Value {
        json!({"manifest": "manifest.json", "config_hash": self.config_hash})
    }
}
