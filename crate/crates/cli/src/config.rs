//! Flat `key=value` configuration; command-line flags override file values.
//!
//! Keys: model, filter, fill_gaps, big, clause_boundary_labels,
//! arg_skip_labels, content_pos_prefixes. List values are comma-separated;
//! `#` starts a comment line.

use std::collections::BTreeMap;

use semproj_core::projection::{Model, PipelineConfig};
use semproj_core::Error;

const KEYS: &[&str] = &[
    "model",
    "filter",
    "fill_gaps",
    "big",
    "clause_boundary_labels",
    "arg_skip_labels",
    "content_pos_prefixes",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse(text: &str) -> Result<Settings, Error> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key {k:?}", i + 1)));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Settings(map))
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key));
        self.0.insert(key.to_string(), value.into());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(|v| {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect()
        })
    }

    /// The pipeline configuration these settings describe. Unset keys take
    /// the defaults of the chosen model.
    pub fn pipeline(&self) -> Result<PipelineConfig, Error> {
        let model = Model::parse(self.get("model").unwrap_or("perfect"))?;
        let mut cfg = PipelineConfig::for_model(model);
        if let Some(filters) = self.list("filter") {
            cfg.filter.na = false;
            cfg.filter.nc = false;
            cfg.arg_filter = false;
            for f in filters {
                match f.to_ascii_lowercase().as_str() {
                    "none" => {}
                    "na" => cfg.filter.na = true,
                    "nc" => cfg.filter.nc = true,
                    "arg" => cfg.arg_filter = true,
                    other => {
                        return Err(Error::Config(format!(
                            "unknown filter {other:?} (expected none, na, nc or arg)"
                        )))
                    }
                }
            }
        }
        if let Some(v) = self.get("fill_gaps") {
            cfg.fill_gaps = match v {
                "true" | "1" | "yes" | "on" => true,
                "false" | "0" | "no" | "off" => false,
                other => return Err(Error::Config(format!("fill_gaps: not a boolean: {other:?}"))),
            };
        }
        if let Some(v) = self.get("big") {
            cfg.big = v
                .parse()
                .map_err(|_| Error::Config(format!("big: not a number: {v:?}")))?;
        }
        if let Some(v) = self.list("clause_boundary_labels") {
            cfg.arg.clause_boundary_labels = v;
        }
        if let Some(v) = self.list("arg_skip_labels") {
            cfg.arg.skip_labels = v;
        }
        if let Some(v) = self.list("content_pos_prefixes") {
            cfg.filter.content_pos_prefixes = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
