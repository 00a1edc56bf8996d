// SPDX-License-Identifier: Apache-2.0

//! `gltau`: command-line driver for the trace-polynomial experiments.

mod config;
mod output;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use gltau::error::ErrorCategory;
use gltau::{Error, Result};
use serde_json::json;

use config::{ExperimentConfig, Kind};
use run::Context;

const DEFAULT_OUT: &str = "gltau-out";

#[derive(Debug, Parser)]
#[command(
    name = "gltau",
    version,
    about = "Trace polynomials of GL(N) Brownian motions"
)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    kind: Kind,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Base seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Base output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Validate and print the predicted work without computing.
    #[arg(long)]
    dry_run: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Config => 2,
        ErrorCategory::Numerical => 3,
        ErrorCategory::Resource => 4,
    }
}

fn reason(e: &Error) -> &'static str {
    match e.category() {
        ErrorCategory::Config => "config",
        ErrorCategory::Numerical => "numerical",
        ErrorCategory::Resource => "resource",
    }
}

fn output_base(args: &Args, cfg: &ExperimentConfig) -> PathBuf {
    args.out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os("GLTAU_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn execute(args: &Args) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    if let Some(k) = cfg.kind {
        if k != args.kind {
            return Err(Error::InvalidArgument(format!(
                "config is for {} but {} was requested",
                k.name(),
                args.kind.name()
            )));
        }
    }
    if args.workers == Some(0) {
        return Err(Error::InvalidArgument(
            "--workers must be at least 1".into(),
        ));
    }
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let base = args.config.parent().unwrap_or(Path::new("."));
    let ctx = Context {
        kind: args.kind,
        config: &cfg,
        seed,
        base,
    };
    if args.dry_run {
        let plan = run::plan(&ctx)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&plan).expect("plan serialises")
        );
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    let clock = Instant::now();
    let started = chrono::Utc::now();
    let out = pool.install(|| run::run(&ctx))?;
    let wall = clock.elapsed().as_secs_f64();

    let stamp = started.format("%Y%m%dT%H%M%SZ").to_string();
    let dir = output::run_directory(&output_base(args, &cfg), args.kind.name(), &stamp)?;
    let files = output::write_tables(&dir, &out.tables)?;
    let manifest = json!({
        "kind": args.kind.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": started.to_rfc3339(),
        "wall_clock_seconds": wall,
        "workers": pool.current_num_threads(),
        "config": cfg,
        "seeds": out.seeds,
        "summary": out.summary,
        "files": files,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    std::fs::write(dir.join("manifest.json"), text + "\n")?;
    println!("{}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error={} message={:?}", reason(&e), e.to_string());
            ExitCode::from(exit_code(&e))
        }
    }
}
