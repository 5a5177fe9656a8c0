use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use log::info;
use relkit_core::composer::{build_dataset, sweep_configs};
use relkit_core::metrics::Table;
use serde::Serialize;

use crate::common::{write_run_json, Ctx};
use crate::generate::effective_config;

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    /// Base generation config (JSON)
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Unique training objects per cell, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub objects: Vec<usize>,

    /// Training stimuli per cell, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub stimuli: Vec<usize>,

    /// Root seed, overriding the config
    #[arg(long, env = "RELKIT_SEED")]
    pub seed: Option<u64>,

    /// Output directory; cell (u, s) goes to u<u>-s<s>/
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn run(ctx: &Ctx, args: &SweepArgs) -> Result<u8> {
    let base = effective_config(ctx, args.config.as_ref(), args.seed)?;
    base.validate()?;
    let out = ctx.path(&args.out);
    let cells = sweep_configs(&base, &args.objects, &args.stimuli, base.root_seed)?;

    let mut rows = Vec::new();
    for (u, s, config) in &cells {
        let dir = format!("u{u}-s{s}");
        info!("building sweep cell {dir}");
        build_dataset(config, config.root_seed)?.write(&out.join(&dir))?;
        rows.push(vec![u.to_string(), s.to_string(), config.dataset_id.clone(), config.root_seed.to_string(), dir]);
    }
    let header = ["unique_objects", "stimuli", "dataset_id", "root_seed", "dir"].map(String::from).to_vec();
    ctx.emit(&out, "sweep", &Table::new(header, rows))?;
    write_run_json(
        &out,
        "sweep",
        ctx.format,
        &serde_json::json!({
            "args": args,
            "base_config": base,
            "cells": cells.iter().map(|(_, _, c)| c).collect::<Vec<_>>(),
        }),
    )?;
    Ok(0)
}
