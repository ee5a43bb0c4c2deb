use crate::error::Result;
use crate::io::{csv_table, pretty_json, RunManifest};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Writes the outputs of one command and its manifest.
pub(crate) struct Sink {
    dir: PathBuf,
    format: Format,
    manifest: RunManifest,
}

impl Sink {
    pub fn new(dir: &Path, format: Format, command: &str, config: Value, seed: Option<u64>) -> Self {
        Sink {
            dir: dir.to_path_buf(),
            format,
            manifest: RunManifest::start(command, config, seed),
        }
    }

    /// A JSON document, whatever the format; the manifest reference is
    /// added under the key `run`.
    pub fn document(&mut self, name: &str, mut doc: Value) -> Result<()> {
        if let Value::Object(m) = &mut doc {
            m.insert("run".into(), self.manifest.reference());
        }
        self.manifest.emit(&self.dir, &format!("{name}.json"), &pretty_json(&doc))?;
        Ok(())
    }

    /// A table of float columns: `name.json` with the columns as arrays, or
    /// `name.csv` with a `name.meta.json` sidecar carrying `meta`.
    pub fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<f64>>, meta: Value) -> Result<()> {
        match self.format {
            Format::Json => {
                let mut cols = serde_json::Map::new();
                for (j, h) in header.iter().enumerate() {
                    let col: Vec<Value> = rows.iter().map(|r| float(r[j])).collect();
                    cols.insert((*h).to_string(), Value::Array(col));
                }
                self.document(name, json!({"columns": cols, "meta": meta}))
            }
            Format::Csv => {
                self.manifest.emit(&self.dir, &format!("{name}.csv"), &csv_table(header, rows))?;
                self.document(&format!("{name}.meta"), json!({"meta": meta}))
            }
        }
    }

    /// Raw text written as is.
    pub fn text(&mut self, file: &str, contents: &str) -> Result<()> {
        self.manifest.emit(&self.dir, file, contents)?;
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf> {
        self.manifest.finish(&self.dir)
    }
}

/// JSON has no non-finite numbers; they are written as strings.
pub(crate) fn float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}
