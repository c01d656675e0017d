//! `fcount`: simulate, evaluate and check order-k counting processes from
//! the command line. Every artifact starts with a `#` block recording the
//! tool version, command, parameters and seed.

mod commands;
mod output;
mod spec;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "fcount",
    version,
    about = "Order-k Poisson and Pólya-Aeppli counting processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Leave the generation time out of the header
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate paths and report N(t) on a time grid
    Simulate(commands::SimulateArgs),
    /// Marginal pmf of N(t), or of the count at a given cumulative mass
    Pmf(commands::PmfArgs),
    /// Mean, variance and optionally Cov(N(s), N(t))
    Moments(commands::MomentsArgs),
    /// Cov(N(s), N(t)) and the correlation over a grid of t
    Cov(commands::CovArgs),
    /// Correlation decay and its power-law fit
    Lrd(commands::LrdArgs),
    /// Solve the fractional master equations on a uniform grid
    Solve(commands::SolveArgs),
    /// Residual of the fractional governing equations
    CheckGoverning(commands::CheckArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(fcount::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(e) => write!(f, "numeric failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<fcount::Error> for CliError {
    fn from(e: fcount::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FCOUNT_THREADS") else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::usage(format!("FCOUNT_THREADS must be a positive integer, got '{raw}'"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("FCOUNT_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let art = match cli.command {
        Command::Simulate(a) => commands::simulate(a)?,
        Command::Pmf(a) => commands::pmf(a)?,
        Command::Moments(a) => commands::moments(a)?,
        Command::Cov(a) => commands::cov(a)?,
        Command::Lrd(a) => commands::lrd(a)?,
        Command::Solve(a) => commands::solve(a)?,
        Command::CheckGoverning(a) => commands::check_governing(a)?,
    };
    art.emit(cli.out.format, cli.out.output.as_deref(), !cli.out.no_timestamp)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed downstream pipe (`| head`) is not a failure
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fcount: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
