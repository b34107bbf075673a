use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dicke_cli::config::ExperimentConfig;
use dicke_cli::experiments::{
    run_chaos_figure, run_convergence_figure, run_dos_figure, run_goe_reference, run_rstat_figure,
    RunOptions, RunOutcome,
};

/// Convergence-audited spectral experiments on the Dicke model.
#[derive(Parser)]
#[command(name = "dicke", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Selected levels against the photon cutoff.
    Converge,
    /// Level histograms against the semiclassical density of states.
    Dos,
    /// Mean gap ratio per cutoff and its plateau.
    Rstat,
    /// Spacing distribution and delta power spectrum.
    Chaos,
    /// Sampled GOE or Poisson reference statistics.
    GoeRef,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to run.output_dir, then out/<run.name>.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides run.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit results from unconverged levels, watermarked.
    #[arg(long, global = true)]
    allow_unconverged: bool,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<RunOutcome> {
    let c = cli.common;
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let path = c.config.context("--config is required")?;
    let cfg = ExperimentConfig::load(&path)?;
    let out_dir = c
        .out
        .or_else(|| cfg.run.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.run.name));
    let opts = RunOptions {
        out_dir,
        seed: c.seed.unwrap_or(cfg.run.seed),
        allow_unconverged: c.allow_unconverged,
    };
    match cli.command {
        Command::Converge => run_convergence_figure(&cfg, &opts),
        Command::Dos => run_dos_figure(&cfg, &opts),
        Command::Rstat => run_rstat_figure(&cfg, &opts),
        Command::Chaos => run_chaos_figure(&cfg, &opts),
        Command::GoeRef => run_goe_reference(&cfg, &opts),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.manifest.summary());
            println!("output: {}", outcome.out_dir.display());
            if outcome.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
