//! `objects/index.json`: the object identities behind a dataset.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Factors, ObjectSource};

pub const OBJECT_INDEX_FILE: &str = "index.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectIndexEntry {
    pub object_id: String,
    pub source: ObjectSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Factors>,
    /// PNG path relative to the objects directory.
    pub file: String,
}

pub fn write_object_index(path: &Path, entries: &[ObjectIndexEntry]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    let text = serde_json::to_string_pretty(entries).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text).map_err(Error::io(path))
}

pub fn read_object_index(path: &Path) -> Result<Vec<ObjectIndexEntry>> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// File name used for an object's PNG. Ids are kept verbatim except for path separators.
pub fn object_file_name(object_id: &str) -> String {
    format!("{}.png", object_id.replace(['/', '\\'], "_"))
}
