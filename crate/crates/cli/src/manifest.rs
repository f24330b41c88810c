//! Run manifest and per-sentence provenance records.
//!
//! A manifest is one JSON object:
//!
//! ```text
//! { "tool": "semproj", "version": "0.1.0", "command": "project",
//!   "config": { "model", "filter_na", "filter_nc", "filter_arg", "fill_gaps",
//!               "big", "clause_boundary_labels", "arg_skip_labels",
//!               "content_pos_prefixes" },
//!   "inputs":  [ { "name", "path", "sha256" } ],
//!   "outputs": [ { "name", "file", "sha256" } ],
//!   "oracle":  { "checked", "skipped" } | null,
//!   "warnings": [ { "sentence", "message" } ] }
//! ```
//!
//! Output entries carry the file name only, so runs that differ only in
//! output directory produce identical manifests.
//!
//! Provenance is JSON lines, one record per projected sentence:
//!
//! ```text
//! { "sentence", "frame", "predicate",
//!   "roles": [ { "label", "projected", "tiled", "source_units": [span],
//!                "links": [ { "src", "tgt", "sim" } ] } ],
//!   "warnings": [ message ] }
//! ```
//!
//! Spans are `lo-hi` strings over tokens of the respective side.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use semproj_core::projection::PipelineConfig;

#[derive(Debug, Serialize)]
pub struct ConfigSnapshot {
    pub model: String,
    pub filter_na: bool,
    pub filter_nc: bool,
    pub filter_arg: bool,
    pub fill_gaps: bool,
    pub big: f64,
    pub clause_boundary_labels: Vec<String>,
    pub arg_skip_labels: Vec<String>,
    pub content_pos_prefixes: Vec<String>,
}

impl From<&PipelineConfig> for ConfigSnapshot {
    fn from(c: &PipelineConfig) -> Self {
        ConfigSnapshot {
            model: c.model.name().to_string(),
            filter_na: c.filter.na,
            filter_nc: c.filter.nc,
            filter_arg: c.arg_filter,
            fill_gaps: c.fill_gaps,
            big: c.big,
            clause_boundary_labels: c.arg.clause_boundary_labels.clone(),
            arg_skip_labels: c.arg.skip_labels.clone(),
            content_pos_prefixes: c.filter.content_pos_prefixes.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InputEntry {
    pub name: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub name: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub checked: usize,
    pub skipped: usize,
}

#[derive(Debug, Serialize)]
pub struct Warning {
    pub sentence: usize,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: ConfigSnapshot,
    pub inputs: Vec<InputEntry>,
    pub outputs: Vec<OutputEntry>,
    pub oracle: Option<OracleSummary>,
    pub warnings: Vec<Warning>,
}

impl RunManifest {
    pub fn new(command: &'static str, config: &PipelineConfig) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: config.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            oracle: None,
            warnings: Vec::new(),
        }
    }

    pub fn add_input(&mut self, name: &str, path: &Path, content: &[u8]) {
        self.inputs.push(InputEntry {
            name: name.to_string(),
            path: path.display().to_string(),
            sha256: sha256_hex(content),
        });
    }

    pub fn add_output(&mut self, name: &str, path: &Path, content: &[u8]) {
        self.outputs.push(OutputEntry {
            name: name.to_string(),
            file: path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            sha256: sha256_hex(content),
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct LinkRecord {
    pub src: String,
    pub tgt: String,
    pub sim: f64,
}

#[derive(Debug, Serialize)]
pub struct RoleRecord {
    pub label: String,
    pub projected: bool,
    pub tiled: bool,
    pub source_units: Vec<String>,
    pub links: Vec<LinkRecord>,
}

#[derive(Debug, Serialize)]
pub struct ProvenanceRecord {
    pub sentence: usize,
    pub frame: String,
    pub predicate: Option<usize>,
    pub roles: Vec<RoleRecord>,
    pub warnings: Vec<String>,
}

impl ProvenanceRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("provenance serializes")
    }
}
