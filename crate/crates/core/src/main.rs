use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::Parser;

use leo_cache_sim::cli::{load_config, run};

/// Sweep the satellite share of an edge-cache content push and report the
/// power-optimal operating point per delivery architecture.
#[derive(Debug, Parser)]
#[command(name = "leo-cache-sim", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// baseline, immediate_forward, relay_forward, store_forward, or all.
    #[arg(long)]
    scenario: Option<String>,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    #[arg(long, env = "LEO_CACHE_SIM_SEED")]
    seed: Option<u64>,

    /// Number of steps in the satellite-fraction grid.
    #[arg(long)]
    grid_steps: Option<usize>,

    /// Suppress warnings and the report on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    match try_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn try_main() -> anyhow::Result<()> {
    let args = Args::parse();
    let mut cfg = load_config(&args.config)?;
    if let Some(sel) = &args.scenario {
        cfg.set_scenarios(sel)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(steps) = args.grid_steps {
        anyhow::ensure!(steps >= 1, "--grid-steps must be at least 1");
        cfg.fraction_steps = steps;
    }
    cfg.out_dir = args.out;

    if !args.quiet {
        for w in &cfg.warnings {
            eprintln!("warning: {w}");
        }
    }
    let artifacts = run(&cfg).with_context(|| format!("run of {} failed", args.config.display()))?;
    if !args.quiet {
        println!("{}", artifacts.report);
        println!("outputs written to {}", cfg.out_dir.display());
    }
    Ok(())
}
