//! `distembed`: command-line access to kernel embeddings of generalized measures.
//!
//! Kernels, measures and experiment parameters are JSON, given inline or as a file
//! path. Scalars go to stdout with 15 significant digits; experiment reports go to
//! CSV and JSON files.
//!
//! Exit codes: 0 success, 1 experiment predicate failed, 2 usage or schema error,
//! 3 numerical error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distembed::embedding;
use distembed::experiments::{format_g15, run_experiment, ExperimentOptions};
use distembed::{Complex64, Error, GeneralizedMeasure, KernelSpec, MultiIndex};

#[derive(Parser)]
#[command(name = "distembed", version, about = "Kernel embeddings of generalized measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// RKHS norm of the embedded measure.
    Norm {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        measure: String,
    },
    /// Kernel distance between two measures.
    Distance {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        other: String,
    },
    /// Value (or a partial derivative) of the embedded function at a point.
    EmbedEval {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        measure: String,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        /// Comma-separated multi-index of the derivative to take.
        #[arg(long, value_delimiter = ',')]
        deriv: Option<Vec<u32>>,
    },
    /// Run a named experiment and report against its acceptance predicate.
    Experiment {
        name: String,
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Experiment parameters as a JSON object.
        #[arg(long)]
        params: Option<String>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report destination.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalInconsistency(_) | Error::QuadratureBudgetExceeded { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Inline JSON when the argument looks like an object, a file path otherwise.
fn read_json(arg: &str, what: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read {what} '{arg}': {e}")))
}

fn parse_kernel(arg: &str) -> Result<KernelSpec, Failure> {
    Ok(read_json(arg, "kernel")?.parse()?)
}

fn parse_measure(arg: &str) -> Result<GeneralizedMeasure, Failure> {
    serde_json::from_str(&read_json(arg, "measure")?).map_err(|e| Failure::Usage(format!("measure JSON: {e}")))
}

fn print_complex(z: Complex64) {
    if z.im == 0.0 {
        println!("{}", format_g15(z.re));
    } else {
        println!("{} {}", format_g15(z.re), format_g15(z.im));
    }
}

fn write(path: &PathBuf, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write '{}': {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Norm { kernel, measure } => {
            let k = parse_kernel(&kernel)?.build()?;
            println!("{}", format_g15(embedding::norm(&k, &parse_measure(&measure)?)?));
        }
        Command::Distance { kernel, measure, other } => {
            let k = parse_kernel(&kernel)?.build()?;
            let d = embedding::distance(&k, &parse_measure(&measure)?, &parse_measure(&other)?)?;
            println!("{}", format_g15(d));
        }
        Command::EmbedEval { kernel, measure, point, deriv } => {
            let k = parse_kernel(&kernel)?.build()?;
            let d = parse_measure(&measure)?;
            let z = match deriv {
                Some(q) => embedding::embed_eval_deriv(&k, &d, &MultiIndex::new(q), &point)?,
                None => embedding::embed_eval(&k, &d, &point)?,
            };
            print_complex(z);
        }
        Command::Experiment { name, kernel, seed, tol, params, out, json } => {
            let opts = ExperimentOptions {
                kernel: kernel.as_deref().map(parse_kernel).transpose()?,
                seed,
                tol,
                params: params
                    .as_deref()
                    .map(|p| {
                        serde_json::from_str(&read_json(p, "params")?)
                            .map_err(|e| Failure::Usage(format!("params JSON: {e}")))
                    })
                    .transpose()?,
            };
            let report = run_experiment(&name, &opts)?;
            match &out {
                Some(path) => write(path, &report.to_csv())?,
                None => print!("{}", report.to_csv()),
            }
            if let Some(path) = &json {
                write(path, &report.to_json())?;
            }
            let verdict = if report.passed { "pass" } else { "fail" };
            eprintln!("{}: {verdict} ({})", report.name, report.predicate);
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
