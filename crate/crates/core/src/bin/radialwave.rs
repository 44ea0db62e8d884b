//! Scenario runner for the radial shifted-wave laboratory.
//!
//! Exit codes: 0 all diagnostics pass (or none asserted), 1 error
//! (bad config, guard violation, I/O), 2 diagnostic failure.

use clap::{Parser, Subcommand};
use radialwave::scenario::{load_scenario, run_scenario, RunMode};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "radialwave", version, about = "shifted wave equation laboratory on radial density models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Override the scenario's output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Size of the worker thread pool (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print progress to stderr.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run solvers, spectra, energies and diagnostics; write the full bundle.
    Run { config: PathBuf },
    /// Compute and export the forward spectra only.
    Spectrum { config: PathBuf },
    /// Run the diagnostics only.
    Check { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("radialwave: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let (mode, config) = match &cli.cmd {
        Cmd::Run { config } => (RunMode::Full, config),
        Cmd::Spectrum { config } => (RunMode::SpectrumOnly, config),
        Cmd::Check { config } => (RunMode::CheckOnly, config),
    };
    let mut sc = match load_scenario(config) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("radialwave: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(out) = cli.out {
        sc.out_dir = out;
    }
    match run_scenario(&sc, mode, cli.verbose) {
        Ok(bundle) => {
            for w in &bundle.warnings {
                eprintln!("radialwave: warning: {w}");
            }
            if bundle.diagnostics_pass {
                println!("ok: bundle written to {}", bundle.out_dir.display());
                ExitCode::from(0)
            } else {
                println!(
                    "diagnostic failure: {} (bundle in {})",
                    bundle.failed.join(", "),
                    bundle.out_dir.display()
                );
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("radialwave: {e}");
            ExitCode::from(1)
        }
    }
}
