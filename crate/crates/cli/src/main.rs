//! `dwset`: reproduce the built-in experiments or run a configured one.
//!
//! Exit status: 0 when every check passes, 1 when a check fails (the report
//! is still written), 2 for usage and configuration errors, 3 for numeric
//! failures such as exhausted precision.

mod config;
mod report;
mod reproduce;
mod run;
mod sample;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use dwset::mapfab::GRAMMAR_HELP;

use config::RunConfig;
use report::Artifacts;

#[derive(Parser)]
#[command(name = "dwset", version, about = "Boundary orbits and Denjoy-Wolff set experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in experiment with fixed parameters and checks.
    Reproduce {
        /// One of the IDs printed by `list`.
        id: String,
        #[arg(long, default_value = "reports")]
        out_dir: PathBuf,
        /// Thread cap; results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run an experiment described by a TOML file; flags override the file.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print the sequence-ID grammar and the reproducible IDs.
    List,
}

const ASSERTION_FAILED: u8 = 1;
const USAGE: u8 = 2;
const NUMERIC: u8 = 3;

fn finish(artifacts: Artifacts, out: &Path, command: &str, started: Instant) -> ExitCode {
    for c in &artifacts.checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    match artifacts.write(out, command, started.elapsed().as_secs_f64()) {
        Ok(dir) => println!("report written to {}", dir.display()),
        Err(e) => {
            eprintln!("error: cannot write report under {}: {e}", out.display());
            return ExitCode::from(USAGE);
        }
    }
    if artifacts.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(ASSERTION_FAILED)
    }
}

fn numeric_failure(e: &dwset::Error, hint: Option<String>) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_numeric() {
        if let Some(h) = hint {
            eprintln!("hint: {h}");
        }
        ExitCode::from(NUMERIC)
    } else {
        ExitCode::from(USAGE)
    }
}

fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    RunConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let started = Instant::now();
    match cli.command {
        Command::List => {
            println!("Sequence IDs:\n{GRAMMAR_HELP}\n\nReproducible IDs:");
            for id in reproduce::IDS {
                println!("  {id:<18} {}", reproduce::describe(id));
            }
            ExitCode::SUCCESS
        }
        Command::Reproduce { id, out_dir, workers } => match reproduce::reproduce(&id, workers) {
            None => {
                eprintln!("error: unknown id {id:?}; expected one of: {}", reproduce::IDS.join(", "));
                ExitCode::from(USAGE)
            }
            Some(Err(e)) => numeric_failure(&e, None),
            Some(Ok(a)) => finish(a, &out_dir, &format!("reproduce {id}"), started),
        },
        Command::Run { config, seed, horizon, samples, tol, workers, out_dir } => {
            let mut cfg = match load_config(&config) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(USAGE);
                }
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.horizon = horizon.unwrap_or(cfg.horizon);
            cfg.samples = samples.unwrap_or(cfg.samples);
            cfg.tol = tol.unwrap_or(cfg.tol);
            cfg.workers = workers.or(cfg.workers);
            cfg.out_dir = out_dir.unwrap_or(cfg.out_dir);
            if let Err(e) = cfg.validate() {
                eprintln!("error: {e}");
                return ExitCode::from(USAGE);
            }
            match run::run(&cfg) {
                Ok(a) => finish(a, &cfg.out_dir, &format!("run -c {}", config.display()), started),
                Err(e) => {
                    let hint = cfg.precision.map(|p| {
                        let planned = dwset::mapfab::build_sequence(&cfg.sequence)
                            .map(|s| dwset::experiments::planned_precision(&s, cfg.horizon))
                            .unwrap_or(0);
                        format!(
                            "the precision override of {p} bits is too low for horizon {}; remove it to use the planned {planned} bits",
                            cfg.horizon
                        )
                    });
                    numeric_failure(&e, hint)
                }
            }
        }
    }
}
