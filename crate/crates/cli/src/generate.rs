use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use log::info;
use relkit_core::composer::{
    build_dataset, build_dissociation_sets, build_single_object_set, domain, generate_objects, GenerationConfig,
    ObjectSourceConfig, VariantKind,
};
use relkit_core::objectgen::FactorCatalog;
use relkit_core::rng::{derive_stream, stream_index};
use relkit_core::Error;
use serde::Serialize;

use crate::common::{load_config, write_run_json, Ctx};

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    /// Generation config (JSON); missing fields take their defaults
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output dataset directory
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,

    /// Dataset variant, overriding the config
    #[arg(long)]
    pub variant: Option<VariantKind>,

    /// Root seed, overriding the config
    #[arg(long, env = "RELKIT_SEED")]
    pub seed: Option<u64>,
}

pub fn effective_config(ctx: &Ctx, config: Option<&PathBuf>, seed: Option<u64>) -> Result<GenerationConfig> {
    let mut config = match config {
        Some(p) => load_config(&ctx.path(p))?,
        None => GenerationConfig::default(),
    };
    if let Some(seed) = seed {
        config.root_seed = seed;
    }
    Ok(config)
}

pub fn run(ctx: &Ctx, args: &GenerateArgs) -> Result<u8> {
    let mut config = effective_config(ctx, args.config.as_ref(), args.seed)?;
    if let Some(v) = args.variant {
        config.variant = v;
    }
    config.validate()?;
    let out = ctx.path(&args.out);
    let seed = config.root_seed;

    match config.variant {
        VariantKind::Dissociation => {
            let ObjectSourceConfig::Factorized { catalog } = &config.source else {
                return Err(Error::InvalidConfig("dissociation sets need a factorized object source".into()).into());
            };
            let catalog = FactorCatalog::procedural(catalog)?;
            let stream = derive_stream(seed, stream_index(domain::DISSOCIATION, 0));
            for (cond, dataset) in build_dissociation_sets(&config, &catalog, &stream)? {
                info!("writing dissociation set {cond}");
                dataset.write(&out.join(cond.name()))?;
            }
        }
        VariantKind::SingleObject => {
            let objects = generate_objects(&config.source, config.object_count, seed)?;
            let stream = derive_stream(seed, stream_index(domain::SINGLE, 0));
            build_single_object_set(&config, &objects, config.single_object_count, &stream)?.write(&out)?;
        }
        _ => {
            let dataset = build_dataset(&config, seed)?;
            info!("writing {} stimuli to {}", dataset.manifest.records.len(), out.display());
            dataset.write(&out)?;
        }
    }

    write_run_json(
        &out,
        "generate",
        ctx.format,
        &serde_json::json!({ "args": args, "config": config }),
    )?;
    Ok(0)
}
