//! Run manifests: written before a pipeline starts and finalized after it
//! emits its files, with enough information to re-run the experiment
//! exactly. Timestamps make the manifest itself non-reproducible; result
//! files are covered by per-file SHA-256 digests instead.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct EmittedFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub kind: String,
    pub seed: u64,
    pub jobs: usize,
    /// SHA-256 of the effective (override-applied) config JSON.
    pub config_hash: String,
    pub versions: Versions,
    pub status: String,
    pub started_unix_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finished_unix_ms: Option<u128>,
    pub emitted_files: Vec<EmittedFile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub cli: &'static str,
    pub core: &'static str,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn start(kind: &str, seed: u64, jobs: usize, config_hash: String) -> Self {
        Self {
            kind: kind.to_string(),
            seed,
            jobs,
            config_hash,
            versions: Versions {
                cli: env!("CARGO_PKG_VERSION"),
                core: naqrl_core_version(),
            },
            status: "running".to_string(),
            started_unix_ms: now_ms(),
            finished_unix_ms: None,
            emitted_files: Vec::new(),
        }
    }

    pub fn write(&self, out_dir: &Path) -> std::io::Result<PathBuf> {
        let path = out_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text)?;
        Ok(path)
    }

    /// Records digests of the emitted files and writes the final manifest.
    pub fn finalize(mut self, out_dir: &Path, files: &[PathBuf]) -> std::io::Result<PathBuf> {
        for file in files {
            let bytes = std::fs::read(file)?;
            let rel = file
                .strip_prefix(out_dir)
                .unwrap_or(file)
                .to_string_lossy()
                .into_owned();
            self.emitted_files.push(EmittedFile {
                path: rel,
                sha256: sha256_hex(&bytes),
            });
        }
        self.status = "complete".to_string();
        self.finished_unix_ms = Some(now_ms());
        self.write(out_dir)
    }
}

fn naqrl_core_version() -> &'static str {
    // kept in lockstep with the workspace release
    "0.1.0"
}
