use crate::error::CliError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Provenance record of one invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub tool_version: String,
    pub seeds: BTreeMap<String, u64>,
    pub workers: usize,
    /// Input path to hex SHA-256; directories are expanded file by file.
    pub inputs: BTreeMap<String, String>,
    /// Output paths relative to the output directory.
    pub outputs: BTreeMap<String, String>,
    pub started_at: String,
    pub finished_at: String,
}

/// Every run that wrote into one output directory, oldest first.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ManifestLog {
    pub runs: Vec<RunManifest>,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

/// Files below `root` in sorted order, paths relative to `root`.
pub fn list_files(root: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(std::io::Error::other)?;
        if entry.file_type().is_file() {
            out.push(entry.path().strip_prefix(root).unwrap_or(entry.path()).to_path_buf());
        }
    }
    Ok(out)
}

/// Checksums of a file, or of every file below a directory.
pub fn checksum_inputs(paths: &[&Path]) -> std::io::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for &p in paths {
        if p.is_dir() {
            for rel in list_files(p)? {
                let full = p.join(&rel);
                out.insert(full.display().to_string(), sha256_file(&full)?);
            }
        } else {
            out.insert(p.display().to_string(), sha256_file(p)?);
        }
    }
    Ok(out)
}

pub fn checksum_outputs(out_dir: &Path) -> std::io::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for rel in list_files(out_dir)? {
        if rel == Path::new(MANIFEST_FILE) {
            continue;
        }
        out.insert(rel.display().to_string(), sha256_file(&out_dir.join(&rel))?);
    }
    Ok(out)
}

/// Appends `run` to the directory's manifest, creating it if needed.
pub fn append(out_dir: &Path, run: RunManifest) -> Result<(), CliError> {
    let path = out_dir.join(MANIFEST_FILE);
    let mut log: ManifestLog = if path.exists() {
        serde_json::from_slice(&std::fs::read(&path)?)
            .map_err(|e| CliError::Domain(format!("existing {} is unreadable: {e}", path.display())))?
    } else {
        ManifestLog::default()
    };
    log.runs.push(run);
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_string_pretty(&log)? + "\n")?;
    std::fs::rename(&tmp, &path)?;
    Ok(())
}
