//! `tristeer`: steering reports, parameter sweeps, Monte Carlo runs and the
//! Schmidt-family re-verification from the command line.
//!
//! Exit codes: 0 success, 1 parse / usage / I/O error, 2 invalid state,
//! 3 a check did not hold (fixture mismatch, failed verification or a
//! monogamy violation).

mod angle;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tristeer::randgen::{Cascade, StateMode};
use tristeer::Tolerances;

use crate::angle::parse_angle;
use crate::commands::{Family, Filter, Layout};

#[derive(Parser, Debug)]
#[command(
    name = "tristeer",
    version,
    about = "EPR steering and monogamy in three-qubit states"
)]
struct Cli {
    /// Seed for every random or quasi-random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Directory for output files. Without it, data goes to stdout.
    #[arg(long, global = true, env = "TRISTEER_OUT_DIR")]
    out: Option<PathBuf>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Validation thresholds for input states: strict or relaxed.
    #[arg(long, global = true, default_value = "strict", value_parser = parse_profile)]
    tolerance_profile: Tolerances,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steering report for a state file, as JSON on stdout.
    Analyze {
        state_file: PathBuf,
        /// Include the B|CA and C|AB cuts, pair → qubit directions and
        /// reversed pairs.
        #[arg(long)]
        all: bool,
    },
    /// H and S values along the GHZ or W family, as CSV.
    Sweep {
        #[arg(value_enum)]
        family: Family,
        /// Fixed θ of the W family.
        #[arg(long, default_value = "pi/3", value_parser = parse_angle)]
        theta: f64,
        /// First grid value (default 0).
        #[arg(long, value_parser = parse_angle)]
        start: Option<f64>,
        /// Last grid value (default pi/2 for ghz, pi for w).
        #[arg(long, value_parser = parse_angle)]
        stop: Option<f64>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Monogamy check on seeded random states: CSV rows plus a JSON summary.
    Montecarlo {
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value = "pure")]
        mode: StateMode,
        /// Keep only rows of one class.
        #[arg(long, value_enum, default_value = "all")]
        filter: Filter,
        #[arg(long, default_value = "verbatim")]
        cascade: Cascade,
    },
    /// Locate the critical points of the Schmidt-family monogamy margin,
    /// match them to the published values and sample the whole domain.
    VerifyAppendix {
        #[arg(long, default_value_t = 2000)]
        starts: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Seeded random states in the JSON state format.
    Random {
        #[arg(long, default_value = "mixed")]
        mode: StateMode,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value = "verbatim")]
        cascade: Cascade,
        /// One JSON-lines stream, or one file per state (needs --out).
        #[arg(long, value_enum, default_value = "jsonl")]
        layout: Layout,
    },
}

fn parse_profile(s: &str) -> Result<Tolerances, String> {
    Tolerances::profile(s)
        .ok_or_else(|| format!("unknown tolerance profile {s:?} (expected strict or relaxed)"))
}

/// A failed run: message for stderr plus the exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const INVALID_STATE: u8 = 2;
    pub const CHECK_FAILED: u8 = 3;

    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    pub fn invalid_state(message: impl Into<String>) -> Self {
        Failure {
            code: Self::INVALID_STATE,
            message: message.into(),
        }
    }

    pub fn check_failed(message: impl Into<String>) -> Self {
        Failure {
            code: Self::CHECK_FAILED,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::usage(format!("CSV error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(format!("JSON error: {e}"))
    }
}

impl From<tristeer::format::FormatError> for Failure {
    fn from(e: tristeer::format::FormatError) -> Self {
        if e.is_invalid_state() {
            Failure::invalid_state(e.to_string())
        } else {
            Failure::usage(e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(format!("cannot start thread pool: {e}")))?;
    }
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Analyze { state_file, all } => {
            commands::analyze(&state_file, all, &cli.tolerance_profile)
        }
        Command::Sweep {
            family,
            theta,
            start,
            stop,
            points,
        } => {
            let config = commands::SweepConfig::new(family, theta, start, stop, points)?;
            commands::sweep(&config, out)
        }
        Command::Montecarlo {
            count,
            mode,
            filter,
            cascade,
        } => commands::montecarlo(cli.seed, count, mode, cascade, filter, out),
        Command::VerifyAppendix { starts, samples } => {
            commands::verify_appendix(cli.seed, starts, samples, out)
        }
        Command::Random {
            mode,
            count,
            cascade,
            layout,
        } => commands::random(cli.seed, mode, count, cascade, layout, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit with 2 on usage errors, which is reserved for
            // invalid states
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(Failure::USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
