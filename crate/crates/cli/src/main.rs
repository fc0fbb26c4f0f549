//! `gapamp` — batch experiment runner for the gap amplification
//! laboratory.
//!
//! ```text
//! gapamp run <config.json> [--param key=value ...]
//! gapamp report <results_dir>
//! ```
//!
//! Exit status: 0 on success, 1 when any invariant fails (or a run
//! errors), 2 on a malformed configuration. `GAPAMP_THREADS` caps the
//! worker pool.

mod config;
mod csvout;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "gapamp", about = "Gap amplification experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Override a scalar parameter, e.g. --param trials=2000.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Aggregate a directory of CSV artifacts into a JSON summary.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, params } => run_command(&config, &params),
        Command::Report { dir } => report_command(&dir),
    }
}

fn run_command(path: &PathBuf, overrides: &[String]) -> ExitCode {
    let mut cfg = match ExperimentConfig::load(path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = cfg.apply_overrides(overrides) {
        eprintln!("config error: {e:#}");
        return ExitCode::from(2);
    }
    if let Err(e) = validate_params(&cfg) {
        eprintln!("config error: {e:#}");
        return ExitCode::from(2);
    }
    init_thread_pool();

    match experiments::run(&cfg) {
        Ok(outcome) => {
            for artifact in &outcome.artifacts {
                println!("wrote {}", artifact.display());
            }
            if outcome.failures > 0 {
                eprintln!(
                    "{} invariant failure(s) in experiment {}",
                    outcome.failures,
                    cfg.experiment.name()
                );
                ExitCode::from(1)
            } else {
                println!("experiment {} passed", cfg.experiment.name());
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("run error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Reject unknown or ill-typed parameter keys before any work starts.
fn validate_params(cfg: &ExperimentConfig) -> anyhow::Result<()> {
    match cfg.experiment {
        ExperimentKind::AmplifyVerify | ExperimentKind::GtildeVerify => {
            cfg.typed_params::<config::AmplifyVerifyParams>().map(|_| ())
        }
        ExperimentKind::LocalHam => cfg.typed_params::<config::LocalHamParams>().map(|_| ()),
        ExperimentKind::TrotterSweep => {
            cfg.typed_params::<config::TrotterSweepParams>().map(|_| ())
        }
        ExperimentKind::SearchBench => {
            cfg.typed_params::<config::SearchBenchParams>().map(|_| ())
        }
        ExperimentKind::LatticeScan => {
            cfg.typed_params::<config::LatticeScanParams>().map(|_| ())
        }
        ExperimentKind::McMix => cfg.typed_params::<config::McMixParams>().map(|_| ()),
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("GAPAMP_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn report_command(dir: &PathBuf) -> ExitCode {
    match report::summarize(dir) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("report error: {e:#}");
            ExitCode::from(1)
        }
    }
}
