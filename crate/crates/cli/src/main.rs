//! Batch front-end. Exit codes: 0 success, 1 usage/config error, 2 runtime
//! failure, 3 an invariant audit found a violation.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use chaos_cli::config::{self, ConfigError};
use chaos_cli::report::{write_report, ExperimentReport};
use chaos_cli::commands;

#[derive(Parser, Debug)]
#[command(
    name = "chaos",
    version,
    about = "Torus particle-chaos experiments: simulation, correlation estimation, mean-field solves, CLT diagnostics and combinatorial audits"
)]
struct Cli {
    /// experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// output directory for the report files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// worker threads (0 = rayon default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    let experiment = match config::parse_config(&text) {
        Ok(c) => c,
        Err(e @ ConfigError::Parse(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e @ ConfigError::Invalid(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }

    let started = Instant::now();
    let payload = match commands::execute(&experiment, cli.seed) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let audit_passed = payload.audit_passed();
    let report = ExperimentReport::new(&experiment, started.elapsed().as_secs_f64(), payload);

    match write_report(&report, &cli.out) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: writing report: {e}");
            return ExitCode::from(2);
        }
    }

    match audit_passed {
        Some(false) => {
            eprintln!("audit FAILED (see report)");
            ExitCode::from(3)
        }
        _ => ExitCode::SUCCESS,
    }
}
