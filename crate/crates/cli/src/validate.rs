use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use relkit_core::datamodel::{validate_dataset, ValidationReport};
use relkit_core::metrics::Table;
use relkit_core::Error;
use serde::Serialize;

use crate::common::{read_manifest, write_file, write_run_json, Ctx, MANIFEST_FILE};

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    /// Dataset directory, or a directory of dataset directories
    pub dataset: PathBuf,

    /// Report directory [default: <DATASET>/validation]
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// The dataset itself when it holds a manifest, otherwise its immediate
/// subdirectories that do.
fn dataset_dirs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    if dir.join(MANIFEST_FILE).is_file() {
        return Ok(vec![(".".into(), dir.to_path_buf())]);
    }
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut dirs = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        if path.join(MANIFEST_FILE).is_file() {
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            dirs.push((name, path));
        }
    }
    if dirs.is_empty() {
        return Err(Error::Io {
            path: dir.join(MANIFEST_FILE),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no manifest found"),
        }
        .into());
    }
    dirs.sort();
    Ok(dirs)
}

pub fn run(ctx: &Ctx, args: &ValidateArgs) -> Result<u8> {
    let dir = ctx.path(&args.dataset);
    let out = args.out.as_ref().map(|p| ctx.path(p)).unwrap_or_else(|| dir.join("validation"));

    let mut reports: Vec<(String, ValidationReport)> = Vec::new();
    for (name, path) in dataset_dirs(&dir)? {
        let manifest = read_manifest(&path)?;
        let report = validate_dataset(&manifest, &path);
        if name == "." {
            print!("{report}");
        } else {
            print!("{name}: {report}");
        }
        reports.push((name, report));
    }

    let mut rows = Vec::new();
    for (name, report) in &reports {
        for v in &report.violations {
            rows.push(vec![name.clone(), v.kind().to_string(), v.to_string()]);
        }
    }
    let table = Table::new(["dataset", "kind", "detail"].map(String::from).to_vec(), rows);
    let text = table.render(ctx.format);
    write_file(&out.join(format!("violations.{}", ctx.format.extension())), text.as_bytes())?;
    write_run_json(&out, "validate", ctx.format, args)?;

    Ok(if reports.iter().all(|(_, r)| r.is_empty()) { 0 } else { 3 })
}
