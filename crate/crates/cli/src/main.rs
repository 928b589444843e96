//! `pslab`: verify presentations of principal subspaces piece by piece.

mod cache;
mod chars;
mod dump;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "pslab", version)]
#[command(about = "Exact checks of principal subspace presentations for affine sl(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare ideals and kernels over all bigrades up to a weight
    Verify(verify::VerifyArgs),
    /// Bigraded dimensions next to difference-two counts and fermionic sums
    Char(chars::CharArgs),
    /// Print the objects living at one bigrade
    Dump(dump::DumpArgs),
    /// Inspect or clear the dimension cache
    Cache {
        #[command(subcommand)]
        action: cache::CacheAction,
        /// Cache file (default: $PSLAB_CACHE, then the user cache directory).
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// `--i all` or a single index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSel {
    All,
    One(u32),
}

impl std::str::FromStr for IndexSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(IndexSel::All);
        }
        s.parse()
            .map(IndexSel::One)
            .map_err(|_| format!("expected `all` or an index, got `{s}`"))
    }
}

impl IndexSel {
    pub fn resolve(self, k: u32) -> Result<Vec<u32>, CliError> {
        match self {
            IndexSel::All => Ok((0..=k).collect()),
            IndexSel::One(i) if i <= k => Ok(vec![i]),
            IndexSel::One(i) => Err(CliError::Usage(format!("index {i} exceeds level {k}"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn io(context: impl fmt::Display, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.to_string(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Internal(_) => 3,
        }
    }
}

/// Checks shared by every subcommand taking `--k`.
pub fn check_level(k: u32, max_level: u32) -> Result<(), CliError> {
    if k == 0 || k > max_level {
        return Err(CliError::Usage(format!(
            "level must be in 1..={max_level}, got {k}"
        )));
    }
    Ok(())
}

/// Runs `f` on a pool with `jobs` threads (all cores if `None`).
pub fn with_jobs<R: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(pool.install(f))
}

/// Writes `text` to `path`, or to stdout.
pub fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p.display(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::io("stdout", e))
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Verify(args) => verify::run(args),
        Command::Char(args) => chars::run(args),
        Command::Dump(args) => dump::run(args).map(|()| true),
        Command::Cache { action, cache } => cache::run(action, cache).map(|()| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("pslab: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
