//! Dataset manifests as JSON Lines.
//!
//! Line 1 is a header object
//! `{format_version, dataset_id, root_seed, config, object_splits}`; every
//! following line is one [`StimulusRecord`] with an extra `checksum` field
//! holding the FNV-1a 64 hash of the image's raw RGB bytes as 16 hex digits.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::composer::GenerationConfig;
use crate::datamodel::records::{Label, ObjectSplits, Split, StimulusRecord};
use crate::error::{Error, Result};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub dataset_id: String,
    pub root_seed: u64,
    pub config: GenerationConfig,
    pub object_splits: ObjectSplits,
    pub records: Vec<StimulusRecord>,
    /// image_path → FNV-1a 64 of the raw RGB bytes.
    pub image_checksums: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    dataset_id: String,
    root_seed: u64,
    config: GenerationConfig,
    object_splits: ObjectSplits,
}

impl DatasetManifest {
    pub fn records_in(&self, split: Split) -> impl Iterator<Item = &StimulusRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn label_counts(&self, split: Split) -> (usize, usize) {
        self.records_in(split).fold((0, 0), |(s, d), r| match r.label {
            Some(Label::Same) => (s + 1, d),
            Some(Label::Different) => (s, d + 1),
            None => (s, d),
        })
    }

    /// A manifest holding only the records of one split.
    pub fn restricted_to(&self, split: Split) -> DatasetManifest {
        let records: Vec<_> = self.records_in(split).cloned().collect();
        let image_checksums = records
            .iter()
            .filter_map(|r| self.image_checksums.get(&r.image_path).map(|c| (r.image_path.clone(), *c)))
            .collect();
        DatasetManifest {
            records,
            image_checksums,
            ..self.clone()
        }
    }

    pub fn write_to<W: Write>(&self, writer: W) -> Result<()> {
        let referenced: std::collections::HashSet<_> = self.records.iter().map(|r| r.image_path.as_str()).collect();
        if let Some(orphan) = self.image_checksums.keys().find(|k| !referenced.contains(k.as_str())) {
            return Err(Error::Parse(format!("checksum for `{orphan}` has no record")));
        }
        let mut w = BufWriter::new(writer);
        let header = Header {
            format_version: MANIFEST_FORMAT_VERSION,
            dataset_id: self.dataset_id.clone(),
            root_seed: self.root_seed,
            config: self.config.clone(),
            object_splits: self.object_splits.clone(),
        };
        let io = |e: std::io::Error| Error::Io {
            path: "<manifest>".into(),
            source: e,
        };
        serde_json::to_writer(&mut w, &header).map_err(|e| Error::Parse(e.to_string()))?;
        w.write_all(b"\n").map_err(io)?;
        for record in &self.records {
            let mut value = serde_json::to_value(record).map_err(|e| Error::Parse(e.to_string()))?;
            if let Some(sum) = self.image_checksums.get(&record.image_path) {
                value["checksum"] = serde_json::Value::String(format!("{sum:016x}"));
            }
            serde_json::to_writer(&mut w, &value).map_err(|e| Error::Parse(e.to_string()))?;
            w.write_all(b"\n").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_from<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let io = |e: std::io::Error| Error::Io {
            path: "<manifest>".into(),
            source: e,
        };
        let first = lines
            .next()
            .ok_or_else(|| Error::Truncated("manifest is empty".into()))?
            .map_err(io)?;
        let raw: serde_json::Value =
            serde_json::from_str(&first).map_err(|e| Error::Parse(format!("manifest header: {e}")))?;
        let version = raw.get("format_version").and_then(|v| v.as_u64());
        if version != Some(MANIFEST_FORMAT_VERSION as u64) {
            return Err(Error::Version {
                expected: MANIFEST_FORMAT_VERSION.to_string(),
                found: raw
                    .get("format_version")
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "none".into()),
            });
        }
        let header: Header =
            serde_json::from_value(raw).map_err(|e| Error::Parse(format!("manifest header: {e}")))?;

        let mut records = Vec::new();
        let mut image_checksums = BTreeMap::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = i + 2;
            let mut value: serde_json::Value =
                serde_json::from_str(&line).map_err(|e| Error::Parse(format!("manifest line {lineno}: {e}")))?;
            let checksum = match value.as_object_mut().and_then(|o| o.remove("checksum")) {
                Some(serde_json::Value::String(hex)) => Some(
                    u64::from_str_radix(&hex, 16)
                        .map_err(|e| Error::Parse(format!("manifest line {lineno}: checksum: {e}")))?,
                ),
                Some(other) => {
                    return Err(Error::Parse(format!("manifest line {lineno}: bad checksum {other}")))
                }
                None => None,
            };
            let record: StimulusRecord =
                serde_json::from_value(value).map_err(|e| Error::Parse(format!("manifest line {lineno}: {e}")))?;
            if let Some(sum) = checksum {
                image_checksums.insert(record.image_path.clone(), sum);
            }
            records.push(record);
        }
        Ok(DatasetManifest {
            dataset_id: header.dataset_id,
            root_seed: header.root_seed,
            config: header.config,
            object_splits: header.object_splits,
            records,
            image_checksums,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(Error::io(parent))?;
        }
        let file = std::fs::File::create(path).map_err(Error::io(path))?;
        self.write_to(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(Error::io(path))?;
        Self::read_from(file)
    }
}
