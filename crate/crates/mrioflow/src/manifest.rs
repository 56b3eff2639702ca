//! Run manifests: a record of the exact inputs and parameters of a
//! command, written alongside its outputs. Re-running a command with
//! the manifest's parameters reproduces the outputs byte for byte, so
//! manifests deliberately carry no timestamps or host-specific state.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub years: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concordance: Option<String>,
    pub output_dir: String,
    pub parameters: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, output_dir: &Path) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            dataset_dir: None,
            years: None,
            concordance: None,
            output_dir: output_dir.display().to_string(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn dataset(mut self, dir: Option<&Path>) -> Self {
        self.dataset_dir = dir.map(|d| d.display().to_string());
        self
    }

    pub fn years(mut self, years: Option<String>) -> Self {
        self.years = years;
        self
    }

    pub fn concordance(mut self, path: Option<&Path>) -> Self {
        self.concordance = path.map(|p| p.display().to_string());
        self
    }

    pub fn param(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.parameters.insert(key.into(), value.into());
        self
    }

    /// Serialize as `run_manifest.json` in the output directory.
    pub fn write(&self, out_dir: &Path) -> io::Result<PathBuf> {
        let path = out_dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_serialization_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let m = RunManifest::new("flows", dir.path())
            .param("from", "ICT")
            .param("to", "OG")
            .param("mode", "series");
        let p1 = m.write(dir.path()).unwrap();
        let first = std::fs::read(&p1).unwrap();
        let p2 = m.write(dir.path()).unwrap();
        let second = std::fs::read(&p2).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.contains("\"command\": \"flows\""));
        // parameters are sorted by key
        let from_pos = text.find("\"from\"").unwrap();
        let mode_pos = text.find("\"mode\"").unwrap();
        let to_pos = text.find("\"to\"").unwrap();
        assert!(from_pos < mode_pos && mode_pos < to_pos);
    }

    #[test]
    fn round_trips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let m = RunManifest::new("case", dir.path()).param("scenario", "xto_microsoft");
        let path = m.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
