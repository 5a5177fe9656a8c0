use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use relkit_core::datamodel::{EmbeddingMatrix, Label, PredictionFile, PROBABILITY_THRESHOLD};
use relkit_core::embedanalysis::{
    pairwise_summary_with, probe_predict, threshold_predict, train_probe, ProbeHyper, SimilaritySummary, DEFAULT_BINS,
};
use relkit_core::metrics::{auc_from_scores, Confusion, Table};
use relkit_core::Error;
use serde::Serialize;

use crate::common::{check_unique_names, parse_named, read_label_map, write_file, write_run_json, Ctx};

const BLOCK: usize = 64;

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    /// Embedding file as NAME=PATH
    #[arg(long = "emb", value_parser = parse_named, required = true)]
    pub embs: Vec<(String, PathBuf)>,

    /// Pairwise cosine similarity summary and histogram per embedding file
    #[arg(long)]
    pub pairwise: bool,

    /// Histogram bins over [-1, 1]
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,

    /// Train a logistic-regression probe and score it on every labelled file
    #[arg(long)]
    pub probe: bool,

    /// Labels for an embedding file as NAME=PATH (label CSV, manifest or dataset directory)
    #[arg(long = "labels", value_parser = parse_named)]
    pub labels: Vec<(String, PathBuf)>,

    /// Embedding file the probe trains on [default: first --emb]
    #[arg(long)]
    pub probe_train: Option<String>,

    #[arg(long, default_value_t = ProbeHyper::default().learning_rate)]
    pub learning_rate: f64,

    #[arg(long, default_value_t = ProbeHyper::default().epochs)]
    pub epochs: usize,

    /// Flag files whose mean similarity exceeds the reference mean plus margin
    #[arg(long, requires = "reference")]
    pub threshold: bool,

    /// Reference embeddings for --threshold
    #[arg(long)]
    pub reference: Option<PathBuf>,

    #[arg(long, default_value_t = 0.0)]
    pub margin: f64,

    /// Report directory
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

fn read_emb(ctx: &Ctx, path: &std::path::Path) -> Result<EmbeddingMatrix> {
    let path = ctx.path(path);
    EmbeddingMatrix::read(&path).with_context(|| format!("reading embeddings {}", path.display()))
}

pub fn run(ctx: &Ctx, args: &AnalyzeArgs) -> Result<u8> {
    if !(args.pairwise || args.probe || args.threshold) {
        return Err(Error::InvalidConfig("choose at least one of --pairwise, --probe, --threshold".into()).into());
    }
    check_unique_names(&args.embs, "embedding")?;
    let out = ctx.path(&args.out);
    let mut embs = Vec::new();
    for (name, path) in &args.embs {
        embs.push((name.clone(), read_emb(ctx, path)?));
    }

    let mut summaries: BTreeMap<String, SimilaritySummary> = BTreeMap::new();
    if args.pairwise || args.threshold {
        for (name, emb) in &embs {
            summaries.insert(name.clone(), pairwise_summary_with(emb, BLOCK, args.bins)?);
        }
    }

    if args.pairwise {
        let mut rows = Vec::new();
        for (name, _) in &embs {
            let s = &summaries[name];
            rows.extend(s.to_table(name).rows);
            let hist = s.histogram.to_table().to_csv();
            write_file(&out.join("histograms").join(format!("{name}.csv")), hist.as_bytes())?;
        }
        let header = ["embeddings", "pairs", "mean", "variance"].map(String::from).to_vec();
        ctx.emit(&out, "pairwise", &Table::new(header, rows))?;
    }

    if args.threshold {
        let reference = read_emb(ctx, args.reference.as_ref().expect("clap requires --reference"))?;
        let reference_mean = pairwise_summary_with(&reference, BLOCK, args.bins)?.mean;
        let means: BTreeMap<String, f64> = summaries.iter().map(|(k, s)| (k.clone(), s.mean)).collect();
        let flags = threshold_predict(reference_mean, &means, args.margin);
        let rows = embs
            .iter()
            .map(|(name, _)| {
                vec![
                    name.clone(),
                    format!("{:.6}", means[name]),
                    format!("{reference_mean:.6}"),
                    flags[name].to_string(),
                ]
            })
            .collect();
        let header = ["embeddings", "mean", "reference_mean", "expectation"].map(String::from).to_vec();
        ctx.emit(&out, "threshold", &Table::new(header, rows))?;
    }

    if args.probe {
        probe(ctx, args, &embs, &out)?;
    }

    write_run_json(&out, "analyze", ctx.format, args)?;
    Ok(0)
}

fn labels_for(emb: &EmbeddingMatrix, map: &BTreeMap<String, Label>, name: &str) -> Result<Vec<Label>> {
    emb.ids()
        .iter()
        .map(|id| {
            map.get(id)
                .copied()
                .ok_or_else(|| Error::Eval(format!("{name}: no label for `{id}`")).into())
        })
        .collect()
}

fn probe(ctx: &Ctx, args: &AnalyzeArgs, embs: &[(String, EmbeddingMatrix)], out: &std::path::Path) -> Result<()> {
    check_unique_names(&args.labels, "labels")?;
    let mut label_maps = BTreeMap::new();
    for (name, path) in &args.labels {
        if !embs.iter().any(|(n, _)| n == name) {
            return Err(Error::InvalidConfig(format!("--labels `{name}` names no --emb")).into());
        }
        label_maps.insert(name.clone(), read_label_map(&ctx.path(path))?);
    }
    let train_name = args.probe_train.clone().unwrap_or_else(|| embs[0].0.clone());
    let (_, train_emb) = embs
        .iter()
        .find(|(n, _)| *n == train_name)
        .ok_or_else(|| Error::InvalidConfig(format!("--probe-train `{train_name}` names no --emb")))?;
    let train_map = label_maps
        .get(&train_name)
        .ok_or_else(|| Error::InvalidConfig(format!("probe training set `{train_name}` has no --labels")))?;
    let hyper = ProbeHyper {
        learning_rate: args.learning_rate,
        epochs: args.epochs,
    };
    let model = train_probe(train_emb, &labels_for(train_emb, train_map, &train_name)?, hyper)?;

    let mut rows = Vec::new();
    for (name, emb) in embs {
        let Some(map) = label_maps.get(name) else { continue };
        let labels = labels_for(emb, map, name)?;
        let preds = probe_predict(&model, emb, "probe", 0)?;
        let mut confusion = Confusion::default();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (truth, p) in labels.iter().zip(&preds) {
            confusion.add(*truth, p.predicted);
            match truth {
                Label::Same => pos.push(p.score_same),
                Label::Different => neg.push(p.score_same),
            }
        }
        let auc = if pos.is_empty() || neg.is_empty() {
            String::new()
        } else {
            format!("{:.4}", auc_from_scores(&pos, &neg)?)
        };
        rows.push(vec![
            train_name.clone(),
            name.clone(),
            confusion.n().to_string(),
            format!("{:.4}", confusion.accuracy()),
            auc,
        ]);
        let file = PredictionFile::new(PROBABILITY_THRESHOLD, preds)?;
        let mut buf = Vec::new();
        file.write_to(&mut buf)?;
        write_file(&out.join("predictions").join(format!("{name}.csv")), &buf)?;
    }

    let losses: String = std::iter::once("epoch,loss\n".to_string())
        .chain(model.meta.losses.iter().enumerate().map(|(i, l)| format!("{i},{l}\n")))
        .collect();
    write_file(&out.join("probe_losses.csv"), losses.as_bytes())?;
    let header = ["train", "test", "n", "accuracy", "auc"].map(String::from).to_vec();
    ctx.emit(out, "probe", &Table::new(header, rows))
}
