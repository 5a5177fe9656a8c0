//! `relkit`: generate, validate, evaluate and analyze same/different datasets.
//!
//! Exit codes: 0 success, 1 invalid config or input, 2 I/O failure,
//! 3 validation violations.

mod analyze;
mod common;
mod eval;
mod generate;
mod sweep;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relkit_core::metrics::ReportFormat;

use crate::common::Ctx;

const EXIT_INVALID: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "relkit", version, about = "Same/different visual relation datasets and evaluation")]
struct Cli {
    /// Base directory for every relative path
    #[arg(long, global = true, default_value = ".")]
    root: PathBuf,

    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Report format (csv or md)
    #[arg(long, global = true, default_value = "csv")]
    format: ReportFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a dataset from a config
    Generate(generate::GenerateArgs),
    /// Check a generated dataset against its invariants
    Validate(validate::ValidateArgs),
    /// Score prediction files against manifests
    Eval(eval::EvalArgs),
    /// Similarity statistics, linear probes and threshold flags for embeddings
    Analyze(analyze::AnalyzeArgs),
    /// Generate a grid of datasets over object and stimulus counts
    Sweep(sweep::SweepArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<relkit_core::Error>() {
            return match e {
                relkit_core::Error::Io { .. } | relkit_core::Error::Image { .. } => EXIT_IO,
                _ => EXIT_INVALID,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_INVALID
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let ctx = Ctx {
        root: cli.root.clone(),
        format: cli.format,
    };
    match &cli.command {
        Command::Generate(a) => generate::run(&ctx, a),
        Command::Validate(a) => validate::run(&ctx, a),
        Command::Eval(a) => eval::run(&ctx, a),
        Command::Analyze(a) => analyze::run(&ctx, a),
        Command::Sweep(a) => sweep::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
