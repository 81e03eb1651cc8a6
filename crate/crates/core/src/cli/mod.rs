//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification check fails (or a
//! computation breaks down numerically), 2 for usage errors including bad
//! input files, 3 for I/O failures.

mod channel;
mod classify;
mod sweep;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::Error;

pub use sweep::{run_sweep, Grid, SweepQuantity, SweepSpec, SweepTable};
pub use verify::{run_verify, Check, Reading, Suite, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qstfidlab",
    version,
    about = "Transfer fidelities of multi-qubit states through parallel amplitude-damping channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a reduction factor or closed-form fidelity over a grid.
    Sweep(SweepArgs),
    /// Compare closed forms with Monte-Carlo estimates.
    Verify(VerifyArgs),
    /// Classify a three-qubit canonical state.
    Classify(ClassifyArgs),
    /// Send a state through parallel channels.
    Channel(ChannelArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// R2, R3, R4a, R4b, class_avg[:tag], four_qubit[:tag] or haar:n.
    #[arg(long)]
    pub quantity: String,
    /// Grid over the single-qubit average fidelity.
    #[arg(long, value_name = "START:STOP:STEPS")]
    pub f1: Option<String>,
    /// Grid over |f| instead of F1.
    #[arg(long, value_name = "START:STOP:STEPS")]
    pub f_abs: Option<String>,
    /// Phase of f for |f| grids.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub f_phase: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Canonical state file: {"lambda": [...5 values...], "phi": x}.
    pub state: PathBuf,
    #[arg(long, default_value_t = crate::classes::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// State file: {"n_qubits": k, "amplitudes": [[re, im], ...]}.
    pub state: PathBuf,
    /// Comma-separated |f| per qubit; a single value applies to all qubits.
    #[arg(long, value_delimiter = ',', conflicts_with = "chain")]
    pub f_abs: Vec<f64>,
    /// Comma-separated phases matching --f-abs (default 0).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub f_phase: Vec<f64>,
    /// Chain file {"N": n, "J": [...], "h": [...]}; every qubit uses the
    /// end-to-end amplitude at --time.
    #[arg(long, requires = "time")]
    pub chain: Option<PathBuf>,
    #[arg(long)]
    pub time: Option<f64>,
    /// Where to write the received density matrix.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            Error::Numerical(_) | Error::SamplerFailure(_) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn read_input(path: &Path) -> CliResult<String> {
    crate::io::read_text(path).map_err(|e| CliError::io(path, e))
}

/// Writes `text` to `path`, or to `stdout` when no path is given.
pub(crate) fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => crate::io::write_text(p, text).map_err(|e| CliError::io(p, e)),
        None => writeln!(stdout, "{text}").map_err(|e| CliError::from(Error::Io(e))),
    }
}

/// Parses arguments and runs one subcommand, returning the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sweep(a) => sweep::command(a, stdout),
        Command::Verify(a) => verify::command(a, stdout),
        Command::Classify(a) => classify::command(a, stdout),
        Command::Channel(a) => channel::command(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
