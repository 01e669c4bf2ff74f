//! Run manifest (`<name>_manifest.json`).
//!
//! Lists the normalized scenario, the derived timescales, the characteristic
//! scales used for SI inputs and a SHA-256 digest of every output file. It
//! carries no timestamps or paths, so identical scenarios give identical
//! manifests.

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "qrf-run-manifest/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

impl FileEntry {
    pub fn new(file: &str, contents: &[u8]) -> Self {
        Self {
            file: file.to_string(),
            bytes: contents.len(),
            sha256: sha256_hex(contents),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalesEntry {
    pub momentum: f64,
    pub mass: f64,
    pub action: f64,
    pub time: f64,
}

/// Timescales in the unit system of the scenario (seconds for SI). Absent
/// when undefined for the scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub tau: Option<f64>,
    pub tau_tilde: Option<f64>,
    pub tau_tilde_fitted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub schema: String,
    pub experiment: String,
    pub units: String,
    /// Unit of every time column: `natural`, `s` or `tau`.
    pub time_unit: String,
    pub config: String,
    pub config_sha256: String,
    pub scales: ScalesEntry,
    pub derived: Derived,
    pub notes: Vec<String>,
    pub outputs: Vec<FileEntry>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
