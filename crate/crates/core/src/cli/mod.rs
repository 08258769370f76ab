//! Command-line front end: argument parsing, input documents, report and CSV
//! formatting, and exit codes.

mod commands;
pub mod input;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    analyze, simulate, sweep_ghz, sweep_w, AnalyzeReport, ClosedSummary, SettingsSource,
    SimulateReport, SweepFamily, SweepSpec,
};
pub use input::{parse_scalar, parse_settings, StateSpec};
pub use verify::{
    run_battery, BatteryConfig, BatteryReport, Failure, GhzCorrelator, SuiteResult, WCorrelator,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Text produced by a command and whether it found a verification failure.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub failed: bool,
}

#[derive(Debug, Parser)]
#[command(name = "tripartite", version, about = "Svetlichny nonlocality of three-qubit pure states")]
pub struct Cli {
    /// Base seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance: numeric/closed agreement for sweeps (default 1e-3),
    /// invariant checks for verify (default 1e-10).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads; defaults to the number of processors.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the CSV or report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entanglement profile, closed-form and numeric maxima, and verdict.
    Analyze {
        state: PathBuf,
        #[arg(long, default_value_t = 50)]
        starts: usize,
    },
    /// Maxima along curves of fixed theta3, theta swept over [0, pi/2].
    SweepGhz {
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long, default_value = "pi/8,pi/4,pi/2")]
        theta3: String,
        #[arg(long, default_value_t = 50)]
        starts: usize,
    },
    /// Maxima along curves of fixed c12, concurrence sum swept over [0, 2].
    SweepW {
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long, default_value = "0.35,0.45,2/3")]
        c12: String,
        #[arg(long, default_value_t = 50)]
        starts: usize,
    },
    /// Invariant battery; exits 1 on any failure.
    Verify {
        /// Random cases per sampled suite.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Finite-shot estimate of the Svetlichny value.
    Simulate {
        state: PathBuf,
        /// Settings document; defaults to maximizing settings for the state.
        #[arg(long)]
        settings: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 50)]
        starts: usize,
    },
}

/// `x` with 9 significant digits, in fixed notation for moderate magnitudes.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("exponent");
    if (-5..9).contains(&exp) {
        format!("{x:.*}", (8 - exp).max(0) as usize)
    } else {
        sci
    }
}

fn positive_tol(tol: Option<f64>, default: f64) -> Result<f64, CliError> {
    match tol {
        None => Ok(default),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(CliError::Input(format!("--tol {t} must be positive"))),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Analyze { state, starts } => {
            let report = analyze(&StateSpec::load(state)?, *starts, seed)?;
            Ok(Outcome {
                body: report.to_string(),
                failed: false,
            })
        }
        Command::SweepGhz {
            steps,
            theta3,
            starts,
        } => sweep_ghz(
            &SweepSpec {
                family: SweepFamily::Ghz {
                    theta3: input::parse_scalar_list(theta3)?,
                },
                steps: *steps,
                starts: *starts,
                tol: positive_tol(cli.tol, 1e-3)?,
            },
            seed,
        ),
        Command::SweepW { steps, c12, starts } => sweep_w(
            &SweepSpec {
                family: SweepFamily::W {
                    c12: input::parse_scalar_list(c12)?,
                },
                steps: *steps,
                starts: *starts,
                tol: positive_tol(cli.tol, 1e-3)?,
            },
            seed,
        ),
        Command::Verify { samples } => {
            let report = run_battery(&BatteryConfig {
                tol: positive_tol(cli.tol, 1e-10)?,
                samples: *samples,
                seed,
                ..BatteryConfig::default()
            })?;
            Ok(Outcome {
                body: report.to_string(),
                failed: !report.passed(),
            })
        }
        Command::Simulate {
            state,
            settings,
            shots,
            starts,
        } => {
            let source = match settings {
                Some(path) => SettingsSource::Given(Box::new(input::load_settings(path)?)),
                None => SettingsSource::Optimal { starts: *starts },
            };
            let report = simulate(&StateSpec::load(state)?, &source, *shots, seed)?;
            Ok(Outcome {
                body: report.to_string(),
                failed: false,
            })
        }
    }
}

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

/// Parse `args`, run the command on a pool of `--jobs` workers and write its
/// output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_IO;
        }
    };
    let result = pool
        .install(|| execute(&cli))
        .and_then(|outcome| emit(&cli, &outcome.body).map(|_| outcome));
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}

pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(Outcome { failed: true, .. }) => EXIT_VERIFICATION,
        Ok(_) => EXIT_OK,
        Err(e) => e.exit_code(),
    }
}
