//! `conewise`: check ordered spaces, operator predicates and theorem suites
//! from JSON files.
//!
//! Exit codes: 0 pass (or a suite whose hypotheses do not hold), 1 a
//! predicate or conclusion is false, 2 input error, 3 undecided or a
//! numerical failure.

mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use conewise::{Error, Tolerances};

use commands::{Outcome, SUITES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// With `--suite` runs a theorem suite or the demos; otherwise with `--op`
/// checks operator predicates on `--space`; otherwise checks `--space`.
#[derive(Debug, Parser)]
#[command(name = "conewise", version, about)]
pub struct Cli {
    /// Space file `{"dim", "dual_rays", "name"}`.
    #[arg(long, value_name = "PATH")]
    pub space: Option<PathBuf>,
    /// Operator file `{"matrix", "space", "domain_basis"}`.
    #[arg(long, value_name = "PATH")]
    pub op: Option<PathBuf>,
    /// Norm file `{"kind", "u", "w"}`; defaults to the sup norm.
    #[arg(long, value_name = "PATH")]
    pub norm: Option<PathBuf>,
    /// One of thm-generator-local, thm-bounded-local, thm-yosida,
    /// cor-positive, demos-all.
    #[arg(long, value_name = "NAME")]
    pub suite: Option<String>,
    /// Suite configuration JSON.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for sampled checks; recorded in every report
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides every relative tolerance.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Decide operator predicates in exact rational arithmetic.
    #[arg(long)]
    pub exact_rational: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Check positivity.
    #[arg(long)]
    pub positive: bool,
    /// Check bipositivity.
    #[arg(long)]
    pub bipositive: bool,
    /// Check locality (band preservation).
    #[arg(long)]
    pub local: bool,
    /// Check disjointness preservation.
    #[arg(long)]
    pub dp: bool,
    /// Density samples for space checks and pairs for sampled fallbacks.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

impl Cli {
    pub fn tolerances(&self) -> Result<Tolerances, Error> {
        match self.tol {
            None => Ok(Tolerances::default()),
            Some(x) if x > 0.0 && x < 1.0 => Ok(Tolerances::with_uniform(x)),
            Some(x) => Err(Error::InvalidInput(format!("--tol must lie in (0, 1), got {x}"))),
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Singular(_) | Error::Overflow { .. } | Error::Numerical(_) | Error::Invariant(_) => 3,
        _ => 2,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("CONEWISE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("CONEWISE_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("cannot configure {n} threads: {e}")))
}

fn run(cli: &Cli) -> Result<(String, Outcome), Error> {
    configure_threads()?;
    if let Some(name) = &cli.suite {
        commands::suite(cli, name)
    } else if cli.op.is_some() {
        commands::operator(cli)
    } else if let Some(path) = &cli.space {
        commands::check_space(cli, path)
    } else {
        Err(Error::InvalidInput(format!(
            "nothing to do: pass --space, --space with --op, or --suite ({})",
            SUITES.join(", ")
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, outcome)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| format!("cannot write output: {e}")),
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
