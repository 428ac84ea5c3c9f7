//! Run manifests: enough metadata to re-run a command and verify the
//! outputs bit-for-bit (resolved config echo, seeds, and SHA-256 checksums
//! of every written file).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileChecksum {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub created_utc: String,
    /// The argv that produced the outputs; replaying it reproduces them
    /// bit-exactly (all randomness is seeded).
    pub command: Vec<String>,
    /// Fully resolved configuration echo.
    pub config: serde_json::Value,
    pub outputs: Vec<FileChecksum>,
}

pub fn sha256_file(path: &Path) -> Result<FileChecksum> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(FileChecksum {
        path: path.display().to_string(),
        bytes: bytes.len() as u64,
        sha256: hex::encode(hasher.finalize()),
    })
}

impl RunManifest {
    pub fn new(command: Vec<String>, config: serde_json::Value) -> Self {
        Self {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            command,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(sha256_file(path)?);
        Ok(())
    }

    /// Atomic JSON write. The manifest itself is excluded from its own
    /// inventory (its timestamp is not part of the reproducible surface).
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string_pretty(self)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Re-hash every output file and compare with the recorded checksums.
    pub fn verify_outputs(&self) -> Result<Vec<(String, bool)>> {
        let mut out = Vec::new();
        for rec in &self.outputs {
            let fresh = sha256_file(Path::new(&rec.path))?;
            out.push((rec.path.clone(), fresh.sha256 == rec.sha256));
        }
        Ok(out)
    }
}
