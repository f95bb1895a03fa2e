//! `polylab`: interpolation solves, variety sampling and the experiment runs
//! of the polyext laboratory.
//!
//! Exit codes: 0 success, 1 input error, 2 undecided, 3 degenerate geometry,
//! 4 search exhausted.

mod commands;
mod output;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use polyext::error::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) | Self::Io(_) => 1,
            Self::Undecided(_) => 2,
            Self::Core(e) => match e {
                Error::Domain(_) | Error::DimensionMismatch { .. } | Error::Precondition(_) => 1,
                Error::Conditioning(_) | Error::Infeasible(_) | Error::Undecided { .. } | Error::ContractViolation(_) => 2,
                Error::DegenerateDirection(_) | Error::NoSamples(_) => 3,
                Error::ResolutionExhausted { .. } => 4,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polylab", version, about = "Pick interpolation on the polydisk and extension experiments")]
struct Cli {
    /// Machine-readable JSON on stdout instead of text or CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal norm of a disk_pick or poly_pick problem, with certificates.
    PickSolve {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance for re-checking the written certificates.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Sampling, graph extraction and retract tests for varieties in the tridisk.
    #[command(subcommand)]
    Variety(VarietyCommand),
    /// End-to-end experiment runs writing report.json and report.txt.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Re-validates a pick-solve result or a problem file (tuples are rebuilt).
    Check { input: PathBuf },
}

#[derive(Debug, Args)]
struct VarietyInput {
    /// `builtin:v0`, `builtin:sum` or a problem file of kind variety.
    input: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum VarietyCommand {
    /// Points of the variety; CSV columns z1re, z1im, ... per point.
    Sample {
        #[command(flatten)]
        v: VarietyInput,
        #[arg(long, default_value_t = 16)]
        resolution: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Roots over a grid in the coordinates `--pair i,j` (zero-based).
    Graph {
        #[command(flatten)]
        v: VarietyInput,
        #[arg(long, value_parser = parse_pair, default_value = "0,1")]
        pair: (usize, usize),
        #[arg(long, default_value_t = polyext::variety::DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Graph-over-every-pair retract test.
    Retract {
        #[command(flatten)]
        v: VarietyInput,
        #[arg(long, default_value_t = polyext::variety::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, default_value_t = polyext::variety::DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Pairs of sample points that are at least 2-balanced.
    ScanBalanced {
        #[command(flatten)]
        v: VarietyInput,
        #[arg(long, default_value_t = 6)]
        resolution: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = polyext::balance::TIE_TOL)]
        tol: f64,
        /// Pairs listed in the output; the total count is always reported.
        #[arg(long, default_value_t = 100)]
        limit: usize,
    },
}

#[derive(Debug, Args)]
struct ReportDir {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    /// The z3 = z1 + z2 non-extension example.
    Exg1 {
        #[arg(long, default_value_t = 0.9)]
        m: f64,
        /// Grid size for the search of real witness pairs.
        #[arg(long, default_value_t = 2000)]
        resolution: usize,
        #[command(flatten)]
        dir: ReportDir,
    },
    /// Extension decomposition or von Neumann violation for data on a variety.
    ExtVsVn {
        /// Problem file of kind experiment; defaults to the exg1 nodes.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.9)]
        m: f64,
        /// Factor applied to the exg1 targets when no input is given.
        #[arg(long, default_value_t = 1.05)]
        scale: f64,
        #[arg(long, default_value_t = 400)]
        resolution: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        dir: ReportDir,
    },
    /// Extremality evidence and omitted arc for a polynomial on a variety.
    CircleImage {
        /// Problem file of kind experiment with `phi`; defaults to z1 on z3 = z1 z2.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        dir: ReportDir,
    },
    /// Fits a rational inner graph through the uniqueness surface.
    UniquenessFit {
        #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
        alpha: Complex64,
        #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
        beta: Complex64,
        #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
        gamma: Complex64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        dir: ReportDir,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected i,j, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_complex_arg(s: &str) -> Result<Complex64, String> {
    problem::parse_complex(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let json = cli.json;
    match cli.command {
        Command::PickSolve { input, out, tol } => commands::pick_solve(&input, out.as_deref(), tol),
        Command::Check { input } => commands::check(&input, json),
        Command::Variety(cmd) => match cmd {
            VarietyCommand::Sample { v, resolution, seed } => commands::variety_sample(&v.input, v.out.as_deref(), resolution, seed, json),
            VarietyCommand::Graph { v, pair, resolution } => commands::variety_graph(&v.input, v.out.as_deref(), pair, resolution, json),
            VarietyCommand::Retract { v, resolution, margin } => commands::variety_retract(&v.input, v.out.as_deref(), resolution, margin),
            VarietyCommand::ScanBalanced { v, resolution, seed, tol, limit } => {
                commands::variety_scan(&v.input, v.out.as_deref(), resolution, seed, tol, limit)
            }
        },
        Command::Experiment(cmd) => match cmd {
            ExperimentCommand::Exg1 { m, resolution, dir } => commands::exg1(m, resolution, &dir.out_dir, json),
            ExperimentCommand::ExtVsVn { input, m, scale, resolution, samples, seed, dir } => {
                let run = commands::ExtVsVnRun { input, m, scale, resolution, samples, seed };
                commands::ext_vs_vn(&run, &dir.out_dir, json)
            }
            ExperimentCommand::CircleImage { input, dir } => commands::circle_image(input.as_deref(), &dir.out_dir, json),
            ExperimentCommand::UniquenessFit { alpha, beta, gamma, samples, seed, dir } => {
                commands::uniqueness_fit([alpha, beta, gamma], samples, seed, &dir.out_dir, json)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polylab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
