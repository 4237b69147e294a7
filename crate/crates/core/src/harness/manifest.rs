//! Run manifest: what was run, what failed, and a digest of every output file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::{list_files, read_json, sha256_file, write_json};
use super::sweep::{Pipeline, SweepParameter};
use crate::error::Result;
use crate::instanton::ChainOptions;
use crate::model::{RawParams, SpectrumSection};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the run directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub point: usize,
    pub realization: usize,
    pub seed: u64,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub value: Option<f64>,
    pub config_hash: String,
    pub model: RawParams,
    pub kappa: f64,
    pub completed: usize,
    pub failed: usize,
    pub mean_giant_drops: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub point_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub pipeline: Pipeline,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub realizations: usize,
    pub master_seed: u64,
    pub base_model: RawParams,
    pub base_config_hash: String,
    pub chain: ChainOptions,
    pub spectrum: SpectrumSection,
    pub points: Vec<PointRecord>,
    pub failures: Vec<FailureRecord>,
    pub warnings: Vec<String>,
    pub timings: Timings,
    pub files: Vec<FileRecord>,
}

/// Digests every file under `root` except the manifest itself, then writes
/// the manifest.
pub fn write_manifest(root: &Path, mut manifest: RunManifest) -> Result<RunManifest> {
    let mut files = Vec::new();
    for rel in list_files(root)? {
        if rel == Path::new(MANIFEST_FILE) {
            continue;
        }
        let (sha256, bytes) = sha256_file(&root.join(&rel))?;
        let path = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push(FileRecord {
            path,
            sha256,
            bytes,
        });
    }
    manifest.files = files;
    write_json(&root.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

pub fn read_manifest(root: &Path) -> Result<RunManifest> {
    read_json(&root.join(MANIFEST_FILE))
}

/// Files whose digest or size no longer matches the manifest, plus files the
/// manifest does not list.
pub fn verify_manifest(root: &Path, manifest: &RunManifest) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for f in &manifest.files {
        match sha256_file(&root.join(&f.path)) {
            Ok((d, b)) if d == f.sha256 && b == f.bytes => {}
            _ => bad.push(f.path.clone()),
        }
    }
    for rel in list_files(root)? {
        let p = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        if p != MANIFEST_FILE && !manifest.files.iter().any(|f| f.path == p) {
            bad.push(p);
        }
    }
    Ok(bad)
}
