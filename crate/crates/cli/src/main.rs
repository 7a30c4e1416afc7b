//! Scenario-driven verification runner.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! configuration errors (unreadable or invalid scenario, malformed
//! parameters, unknown report-format version).

mod report;
mod runner;
mod scenario;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "finsler-cvf",
    version,
    about = "Construct and numerically verify conformal vector fields of (alpha, beta)-metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a bundled scenario by name) and report.
    Run {
        /// Path to a scenario JSON file, or the name of a bundled scenario.
        file: PathBuf,
        /// Write the machine-readable JSON report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Override the residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List the bundled golden scenarios.
    ListScenarios,
    /// Print the machine-readable report schema.
    ReportFormat {
        /// Schema version to describe (defaults to the current one).
        version: Option<String>,
    },
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("FINSLER_CVF_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run_command(
    file: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    samples: Option<usize>,
    tol: Option<f64>,
) -> ExitCode {
    let mut scenario = match scenario::load_scenario(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Some(sampling) = scenario.sampling_mut() {
        if let Some(seed) = seed {
            sampling.seed = seed;
        }
        if let Some(samples) = samples {
            sampling.count = samples;
        }
    }
    if let Some(tol) = tol {
        if let Some(tolerances) = scenario.tolerances_mut() {
            tolerances.residual = tol;
        }
    }
    let started = Instant::now();
    let report = match runner::run_scenario(&scenario) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.render_human(started.elapsed()));
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, report.to_json()) {
            eprintln!("cannot write report to {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            file,
            out,
            seed,
            samples,
            tol,
        } => run_command(file, out, seed, samples, tol),
        Command::ListScenarios => {
            for bundled in scenario::bundled_scenarios() {
                println!("{:32} {}", bundled.name, bundled.description);
            }
            ExitCode::SUCCESS
        }
        Command::ReportFormat { version } => {
            let version = version.unwrap_or_else(|| report::SCHEMA_VERSION.to_string());
            match report::schema_description(&version) {
                Some(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!(
                        "unknown report schema version {version:?}; current is {:?}",
                        report::SCHEMA_VERSION
                    );
                    ExitCode::from(2)
                }
            }
        }
    }
}
