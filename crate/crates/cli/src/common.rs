//! Path resolution, named-path arguments and report output shared by the subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use relkit_core::composer::GenerationConfig;
use relkit_core::datamodel::{read_labels_file, DatasetManifest, Label};
use relkit_core::metrics::{ReportFormat, Table};
use relkit_core::Error;
use serde::Serialize;

pub const RUN_FILE: &str = "run.json";
pub const MANIFEST_FILE: &str = "manifest.jsonl";

pub struct Ctx {
    pub root: PathBuf,
    pub format: ReportFormat,
}

impl Ctx {
    pub fn path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    /// Writes `<dir>/<stem>.<ext>` in the selected format and echoes it to stdout.
    pub fn emit(&self, dir: &Path, stem: &str, table: &Table) -> Result<()> {
        let text = table.render(self.format);
        write_file(&dir.join(format!("{stem}.{}", self.format.extension())), text.as_bytes())?;
        print!("{text}");
        Ok(())
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// `run.json` echo of the parameters a run actually used.
pub fn write_run_json(dir: &Path, command: &str, format: ReportFormat, params: &impl Serialize) -> Result<()> {
    let value = serde_json::json!({
        "command": command,
        "format": format.extension(),
        "params": params,
    });
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    write_file(&dir.join(RUN_FILE), text.as_bytes())
}

pub fn parse_named(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => Ok((name.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected NAME=PATH, got `{s}`")),
    }
}

pub fn check_unique_names(named: &[(String, PathBuf)], what: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for (name, _) in named {
        if !seen.insert(name) {
            bail!(Error::InvalidConfig(format!("{what} name `{name}` given twice")));
        }
    }
    Ok(())
}

pub fn load_config(path: &Path) -> Result<GenerationConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    Ok(config)
}

/// Accepts a manifest file or a dataset directory containing one.
pub fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let file = manifest_path(path);
    DatasetManifest::read(&file).with_context(|| format!("reading manifest {}", file.display()))
}

/// Ground-truth labels keyed by stimulus id, from a label CSV or a manifest.
pub fn read_label_map(path: &Path) -> Result<BTreeMap<String, Label>> {
    if path.extension().is_some_and(|e| e == "csv") {
        Ok(read_labels_file(path)?
            .into_iter()
            .map(|r| (r.stimulus_id, r.label))
            .collect())
    } else {
        Ok(read_manifest(path)?
            .records
            .into_iter()
            .filter_map(|r| r.label.map(|l| (r.stimulus_id, l)))
            .collect())
    }
}
