use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hadamard_prox::config::{check, run_experiment, ExperimentConfig, FailureKind};
use hadamard_prox::suite::run_property_suite;

const VALIDATION: u8 = 1;
const NUMERIC: u8 = 2;
const SUITE_FAILED: u8 = 3;

/// Proximal point experiments on Hadamard spaces.
#[derive(Parser)]
#[command(name = "hadamard-prox", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config; prints the summary as JSON.
    Run {
        config: PathBuf,
        /// Override `algorithm.max_iter`.
        #[arg(long)]
        max_iter: Option<usize>,
        /// Override `algorithm.residual_tol`.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Validate a config and print its schedule verdicts as JSON.
    Check {
        config: PathBuf,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Run a property suite: geometry, tangent, resolvent, algorithms or all.
    Suite {
        name: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn load(path: &PathBuf, max_iter: Option<usize>, tol: Option<f64>) -> Result<ExperimentConfig, ExitCode> {
    let mut config = ExperimentConfig::from_path(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(VALIDATION)
    })?;
    if let Some(n) = max_iter {
        config.algorithm.max_iter = n;
    }
    if let Some(t) = tol {
        config.algorithm.residual_tol = t;
    }
    Ok(config)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, max_iter, tol } => {
            let config = match load(&config, max_iter, tol) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match run_experiment(&config) {
                Ok(summary) => {
                    print_json(&summary);
                    ExitCode::SUCCESS
                }
                Err(failure) => {
                    eprintln!("error: {failure}");
                    if let Some(summary) = &failure.summary {
                        print_json(summary);
                    }
                    ExitCode::from(match failure.kind {
                        FailureKind::Numeric => NUMERIC,
                        FailureKind::Validation | FailureKind::Output => VALIDATION,
                    })
                }
            }
        }
        Command::Check { config, max_iter } => {
            let config = match load(&config, max_iter, None) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match check(&config) {
                Ok(reports) => {
                    print_json(&reports);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(VALIDATION)
                }
            }
        }
        Command::Suite {
            name,
            samples,
            seed,
            report,
        } => {
            let result = match run_property_suite(&name, samples, seed) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(VALIDATION);
                }
            };
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            for p in &result.properties {
                let worst = p.max_violation.map_or("-".to_string(), |v| format!("{v:.3e}"));
                eprintln!(
                    "{} {:<10} {:<34} worst {worst:>10} tol {:.0e}",
                    if p.passed { "PASS" } else { "FAIL" },
                    p.space,
                    p.property,
                    p.tolerance
                );
            }
            print_json(&result);
            if let Some(path) = report {
                let text = serde_json::to_string_pretty(&result).expect("serializable") + "\n";
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(VALIDATION);
                }
            }
            if result.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(SUITE_FAILED)
            }
        }
    }
}
