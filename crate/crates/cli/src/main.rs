//! `seqmeas`: verification suites, the four-dimensional example, instance
//! checks, the constrained search and the truncated-shift demo, all emitting
//! JSON (or CSV) reports.

mod commands;
mod parse;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seqmeas::Tolerances;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "seqmeas",
    version,
    about = "Sequential projective measurement toolkit"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for every random draw
    #[arg(long, global = true, env = "SEQMEAS_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Operator equality threshold (Frobenius norm)
    #[arg(long, global = true, alias = "tolerance", env = "SEQMEAS_EQ_TOL")]
    pub eq_tol: Option<f64>,

    /// Eigenvalue cutoff for subspace extraction
    #[arg(long, global = true, env = "SEQMEAS_RANK_TOL")]
    pub rank_tol: Option<f64>,

    /// Probability comparison threshold
    #[arg(long, global = true, env = "SEQMEAS_PROB_TOL")]
    pub prob_tol: Option<f64>,

    /// Write the report here instead of stdout
    #[arg(long, global = true, env = "SEQMEAS_OUT")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, env = "SEQMEAS_FORMAT", default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every property suite; exit 1 if any fails
    Verify(commands::VerifyArgs),
    /// Evaluate the four-dimensional order-effect example at angle theta
    Example(commands::ExampleArgs),
    /// Evaluate all criteria on an instance file
    Check(commands::CheckArgs),
    /// Search for the largest order effect under repeatability constraints
    Search(commands::SearchArgs),
    /// Truncated shift operator with E = M*M not a projector
    ShiftDemo(commands::ShiftArgs),
}

/// Failure modes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2.
    Input(String),
    /// Exit 2 as well; the output could not be written.
    Io(String),
}

impl From<seqmeas::Error> for CliError {
    fn from(e: seqmeas::Error) -> Self {
        Self::Input(e.to_string())
    }
}

/// A finished command: the report plus whether verification passed.
pub struct Outcome {
    pub json: serde_json::Value,
    pub csv: Vec<Vec<String>>,
    pub passed: bool,
    pub summary: String,
}

/// Top-level report wrapper shared by every command.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Envelope<'a> {
    schema_version: u32,
    version: &'static str,
    command: &'a str,
    seed: u64,
    tolerances: Tolerances<f64>,
    passed: bool,
    result: &'a serde_json::Value,
}

impl GlobalOpts {
    pub fn tolerances(&self) -> Result<Tolerances<f64>, CliError> {
        let d = Tolerances::<f64>::default();
        Ok(Tolerances::new(
            self.eq_tol.unwrap_or(d.eq_tol),
            self.rank_tol.unwrap_or(d.rank_tol),
            self.prob_tol.unwrap_or(d.prob_tol),
        )?)
    }
}

fn emit(
    global: &GlobalOpts,
    command: &str,
    tol: Tolerances<f64>,
    outcome: &Outcome,
) -> Result<(), CliError> {
    let bytes = match global.format {
        Format::Json => {
            let env = Envelope {
                schema_version: SCHEMA_VERSION,
                version: env!("CARGO_PKG_VERSION"),
                command,
                seed: global.seed,
                tolerances: tol,
                passed: outcome.passed,
                result: &outcome.json,
            };
            let mut s =
                serde_json::to_string_pretty(&env).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .flexible(true)
                .from_writer(Vec::new());
            for row in &outcome.csv {
                w.write_record(row)
                    .map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))?
        }
    };
    match &global.out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(&bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let tol = cli.global.tolerances()?;
    let (name, outcome) = match &cli.command {
        Command::Verify(a) => ("verify", commands::verify(&cli.global, &tol, a)?),
        Command::Example(a) => ("example", commands::example(&tol, a)?),
        Command::Check(a) => ("check", commands::check(&tol, a)?),
        Command::Search(a) => ("search", commands::search(&cli.global, &tol, a)?),
        Command::ShiftDemo(a) => ("shift-demo", commands::shift_demo(&tol, a)?),
    };
    emit(&cli.global, name, tol, &outcome)?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout with exit 0; usage errors exit 2.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) | Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
