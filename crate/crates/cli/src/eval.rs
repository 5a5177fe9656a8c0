use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use relkit_core::datamodel::{DatasetManifest, DissociationCondition, PredictionFile, Split};
use relkit_core::metrics::{
    evaluate, generalization_matrix, logit_table, mean_logit_by_class, median_over_seeds, proportion_same,
    proportion_table, Table,
};
use relkit_core::Error;
use serde::Serialize;

use crate::common::{check_unique_names, parse_named, read_manifest, write_run_json, Ctx};

#[derive(Clone, Debug, Serialize)]
pub struct PredArg {
    pub train: Option<String>,
    pub test: String,
    pub path: PathBuf,
}

impl PredArg {
    fn key(&self) -> String {
        match &self.train {
            Some(t) => format!("{t}:{}", self.test),
            None => self.test.clone(),
        }
    }
}

fn parse_pred(s: &str) -> Result<PredArg, String> {
    let (key, path) = parse_named(s).map_err(|_| format!("expected [TRAIN:]TEST=PATH, got `{s}`"))?;
    let (train, test) = match key.split_once(':') {
        Some((tr, te)) if !tr.is_empty() && !te.is_empty() => (Some(tr.to_string()), te.to_string()),
        Some(_) => return Err(format!("expected [TRAIN:]TEST=PATH, got `{s}`")),
        None => (None, key),
    };
    Ok(PredArg { train, test, path })
}

fn parse_split(s: &str) -> Result<String, String> {
    match s {
        "train" | "val" | "test" | "all" => Ok(s.to_string()),
        _ => Err(format!("expected train, val, test or all, got `{s}`")),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    /// Ground truth as NAME=PATH (manifest file or dataset directory)
    #[arg(long = "manifest", value_parser = parse_named)]
    pub manifests: Vec<(String, PathBuf)>,

    /// Prediction CSV as [TRAIN:]TEST=PATH; TEST names a --manifest
    #[arg(long = "pred", value_parser = parse_pred, required = true)]
    pub preds: Vec<PredArg>,

    /// Manifest split to score against
    #[arg(long, default_value = "test", value_parser = parse_split)]
    pub split: String,

    /// Also emit the train × test accuracy matrix with off-diagonal averages
    #[arg(long)]
    pub matrix: bool,

    /// Also emit mean logits by ground-truth class
    #[arg(long)]
    pub logits: bool,

    /// Directory holding one dataset per dissociation condition; each --pred
    /// is then one model scored on all eight sets
    #[arg(long, conflicts_with_all = ["matrix", "logits"])]
    pub dissociation: Option<PathBuf>,

    /// Report directory
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

fn restrict(manifest: DatasetManifest, split: &str) -> DatasetManifest {
    let split = match split {
        "train" => Split::Train,
        "val" => Split::Val,
        "test" => Split::Test,
        _ => return manifest,
    };
    manifest.restricted_to(split)
}

fn read_preds(ctx: &Ctx, p: &PredArg) -> Result<PredictionFile> {
    let path = ctx.path(&p.path);
    PredictionFile::read(&path).with_context(|| format!("reading predictions {}", path.display()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_default()
}

pub fn run(ctx: &Ctx, args: &EvalArgs) -> Result<u8> {
    let out = ctx.path(&args.out);
    if let Some(dir) = &args.dissociation {
        dissociation(ctx, args, &ctx.path(dir), &out)?;
        write_run_json(&out, "eval", ctx.format, args)?;
        return Ok(0);
    }

    check_unique_names(&args.manifests, "manifest")?;
    let mut manifests = BTreeMap::new();
    for (name, path) in &args.manifests {
        manifests.insert(name.clone(), restrict(read_manifest(&ctx.path(path))?, &args.split));
    }
    let manifest_for = |p: &PredArg| {
        manifests
            .get(&p.test)
            .ok_or_else(|| Error::InvalidConfig(format!("no --manifest named `{}`", p.test)))
    };

    let mut rows = Vec::new();
    let mut per_cell: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    let mut logit_rows = Vec::new();
    let (mut train_names, mut test_names) = (Vec::<String>::new(), Vec::<String>::new());
    for p in &args.preds {
        let manifest = manifest_for(p)?;
        let preds = read_preds(ctx, p)?;
        for seed in preds.seeds() {
            let r = evaluate(&preds.for_seed(seed), manifest)
                .with_context(|| format!("evaluating {}", p.path.display()))?;
            let c = r.confusion;
            rows.push(vec![
                p.train.clone().unwrap_or_default(),
                p.test.clone(),
                seed.to_string(),
                r.n.to_string(),
                format!("{:.4}", r.accuracy),
                fmt_opt(r.auc),
                c.td_pd.to_string(),
                c.td_ps.to_string(),
                c.ts_pd.to_string(),
                c.ts_ps.to_string(),
            ]);
            if let Some(train) = &p.train {
                per_cell.entry((train.clone(), p.test.clone())).or_default().push(r.accuracy);
            }
            if args.logits {
                logit_rows.push((format!("{}#{seed}", p.key()), mean_logit_by_class(&preds.for_seed(seed), manifest)?));
            }
        }
        if let Some(train) = &p.train {
            if !train_names.contains(train) {
                train_names.push(train.clone());
            }
        }
        if !test_names.contains(&p.test) {
            test_names.push(p.test.clone());
        }
    }

    let header = ["train", "test", "seed", "n", "accuracy", "auc", "td_pd", "td_ps", "ts_pd", "ts_ps"];
    ctx.emit(&out, "cells", &Table::new(header.map(String::from).to_vec(), rows))?;

    if args.matrix {
        if let Some(p) = args.preds.iter().find(|p| p.train.is_none()) {
            return Err(Error::InvalidConfig(format!("--matrix needs TRAIN:TEST keys, got `{}`", p.key())).into());
        }
        let m = generalization_matrix(&per_cell, &train_names, &test_names)?;
        ctx.emit(&out, "matrix", &m.to_table(100.0, 1))?;
    }
    if args.logits {
        ctx.emit(&out, "logits", &logit_table(&logit_rows))?;
    }
    write_run_json(&out, "eval", ctx.format, args)?;
    Ok(0)
}

fn dissociation(ctx: &Ctx, args: &EvalArgs, dir: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let manifests = DissociationCondition::all()
        .into_iter()
        .map(|c| Ok((c, read_manifest(&dir.join(c.name()))?)))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<(DissociationCondition, &DatasetManifest)> = manifests.iter().map(|(c, m)| (*c, m)).collect();

    let mut rows = Vec::new();
    for p in &args.preds {
        let preds = read_preds(ctx, p)?;
        let per_seed = preds
            .seeds()
            .into_iter()
            .map(|s| proportion_same(&preds.for_seed(s), &refs))
            .collect::<relkit_core::Result<Vec<_>>>()?;
        let medians = DissociationCondition::all()
            .into_iter()
            .enumerate()
            .map(|(i, c)| Ok((c, median_over_seeds(&per_seed.iter().map(|v| v[i].1).collect::<Vec<_>>())?)))
            .collect::<relkit_core::Result<Vec<_>>>()?;
        rows.push((p.key(), None, medians));
    }
    ctx.emit(out, "proportions", &proportion_table(&rows))
}
