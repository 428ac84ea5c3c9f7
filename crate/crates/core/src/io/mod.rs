//! Persistence: binary snapshots, diagnostics tables, run manifests.
//! All writers go through write-temp-then-rename.

mod manifest;
mod records;
mod snapshot;

pub use manifest::{sha256_file, FileChecksum, RunManifest};
pub use records::{read_diagnostics_jsonl, write_diagnostics, DiagFormat, CSV_COLUMNS};
pub use snapshot::{
    read_snapshot, read_snapshot_header, write_snapshot, SnapshotHeader, SNAPSHOT_VERSION,
};

/// Atomic text write (temp file + rename, same directory).
pub fn write_text_atomic(path: &std::path::Path, text: &str) -> crate::error::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text.as_bytes())?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
