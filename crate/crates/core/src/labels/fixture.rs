//! Fixture backend: annotations read from JSON sidecar files.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::labels::{LabelBackend, ModelRequest, PhotoRecord, PhotoRecordWire};

/// Suffix every sidecar file carries: `<photo_id>.labels.json`.
pub const SIDECAR_SUFFIX: &str = ".labels.json";

/// Reads `<photo_id>.labels.json` sidecars under a root directory. Pure:
/// the same fixture file always yields the same record.
#[derive(Debug, Clone)]
pub struct FixtureBackend {
    root: PathBuf,
}

impl FixtureBackend {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FixtureBackend { root: root.into() }
    }

    fn resolve(&self, photo_ref: &str) -> PathBuf {
        if photo_ref.ends_with(SIDECAR_SUFFIX) {
            let as_path = Path::new(photo_ref);
            if as_path.is_absolute() {
                return as_path.to_path_buf();
            }
            return self.root.join(as_path);
        }
        self.root.join(format!("{photo_ref}{SIDECAR_SUFFIX}"))
    }
}

impl LabelBackend for FixtureBackend {
    fn fetch_annotations(&self, photo_ref: &str, models: &ModelRequest) -> Result<PhotoRecord> {
        load_sidecar(&self.resolve(photo_ref), models)
    }
}

/// Parse one sidecar file into a validated record.
pub fn load_sidecar(path: &Path, models: &ModelRequest) -> Result<PhotoRecord> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let wire: PhotoRecordWire = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    PhotoRecord::from_wire(wire, models, &path.display().to_string())
}

/// All sidecar files directly under `dir`, sorted by file name so that
/// downstream stages see a stable order.
pub fn list_sidecars(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(SIDECAR_SUFFIX))
        {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}
