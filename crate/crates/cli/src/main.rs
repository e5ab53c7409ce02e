//! `gridmul` — verify the kernels, benchmark them, inspect launch budgets,
//! and walk through the execution model on a toy grid.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 infeasible configuration, 4 I/O error.

mod bench_cmd;
mod budget;
mod demo;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridmul_core::bench::ImplId;
use gridmul_core::ScalarKind;

#[derive(Debug)]
pub enum CliError {
    /// A computed result was out of tolerance (exit 1).
    Verification(String),
    /// The requested configuration cannot run and the user asked for it
    /// explicitly (exit 3).
    Infeasible(String),
    /// Filesystem trouble (exit 4).
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Verification(msg)
            | CliError::Infeasible(msg)
            | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

fn parse_kind(s: &str) -> Result<ScalarKind, String> {
    ScalarKind::parse(s).ok_or_else(|| format!("unknown scalar kind '{s}' (f32, f64, c64)"))
}

fn parse_impl(s: &str) -> Result<ImplId, String> {
    ImplId::parse(s).ok_or_else(|| {
        let names: Vec<&str> = ImplId::ALL.iter().map(|i| i.name()).collect();
        format!("unknown implementation '{s}' ({})", names.join(", "))
    })
}

/// "X,Y" pair for grid/block dimensions.
fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected X,Y — got '{s}'"))?;
    let parse = |raw: &str| -> Result<usize, String> {
        raw.trim()
            .parse()
            .map_err(|_| format!("bad dimension '{raw}' in '{s}'"))
    };
    Ok((parse(x)?, parse(y)?))
}

#[derive(Parser)]
#[command(
    name = "gridmul",
    about = "Grid/block/thread matrix kernels on a deterministic CPU engine",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every kernel against the sequential reference.
    Verify(VerifyArgs),
    /// Time implementations across sizes and scalar kinds.
    Bench(BenchArgs),
    /// Shared-memory footprint of a tile configuration vs a profile.
    Budget(BudgetArgs),
    /// Print the (block, thread) -> output element ownership map.
    Demo(DemoArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Matrix sides to verify (comma-separated).
    #[arg(
        long = "size",
        value_delimiter = ',',
        default_values_t = vec![1usize, 2, 15, 16, 17, 31, 32, 33, 64, 128]
    )]
    sizes: Vec<usize>,

    /// Scalar kinds: f32, f64, c64 (comma-separated; default all).
    #[arg(long = "kind", value_parser = parse_kind, value_delimiter = ',')]
    kinds: Vec<ScalarKind>,

    /// Kernel block side.
    #[arg(long, default_value_t = 16)]
    block: usize,

    /// Seed for the A operand; B uses seed+1.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Implementations to check (default: single_block, global, tiled —
    /// infeasible combinations are skipped; naming one explicitly makes
    /// the same combination a hard error instead).
    #[arg(long = "impl", value_parser = parse_impl, value_delimiter = ',')]
    impls: Vec<ImplId>,

    /// Verify a stored A operand (STMX fixture) instead of seeded inputs.
    #[arg(long, requires = "fixture_b")]
    fixture_a: Option<PathBuf>,

    /// The matching B operand fixture.
    #[arg(long, requires = "fixture_a")]
    fixture_b: Option<PathBuf>,

    /// Write the seeded input matrices as STMX fixtures into this
    /// directory before verifying.
    #[arg(long)]
    dump_fixtures: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Square matmul sizes (comma-separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![256usize, 512, 1024])]
    sizes: Vec<usize>,

    /// Elementwise matrix sides (comma-separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![4096usize])]
    elem_sizes: Vec<usize>,

    /// Scalar kinds (default all).
    #[arg(long = "kinds", value_parser = parse_kind, value_delimiter = ',')]
    kinds: Vec<ScalarKind>,

    /// Implementations to run (default: all seven).
    #[arg(long = "impls", value_parser = parse_impl, value_delimiter = ',')]
    impls: Vec<ImplId>,

    /// Kernel block side.
    #[arg(long, default_value_t = 16)]
    block: usize,

    /// Strassen recursion cutoff.
    #[arg(long, default_value_t = 64)]
    cutoff: usize,

    /// Timed repetitions per case (median is reported).
    #[arg(long, default_value_t = 3)]
    reps: usize,

    /// Seed for the A operand; B uses seed+1.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Implementation speedups are measured against.
    #[arg(long, value_parser = parse_impl, default_value = "seq")]
    baseline: ImplId,

    /// Write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Write per-figure plot data (CSV with a leading figure column).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    /// Tile side length.
    #[arg(long)]
    block: usize,

    /// Number of tiles resident at once.
    #[arg(long, default_value_t = 2)]
    tiles: usize,

    /// Bytes per element (4 = f32, 8 = f64/c64).
    #[arg(long, default_value_t = 8)]
    elem_bytes: usize,

    /// Device profile: legacy or modern.
    #[arg(long, default_value = "modern", value_parser = budget::parse_profile)]
    profile: gridmul_core::engine::DeviceProfile,
}

#[derive(Args)]
struct DemoArgs {
    /// Grid dimensions as X,Y blocks.
    #[arg(long, value_parser = parse_dims, default_value = "1,1")]
    grid: (usize, usize),

    /// Block dimensions as X,Y threads.
    #[arg(long, value_parser = parse_dims, default_value = "3,3")]
    block: (usize, usize),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify(args) => verify::run(args),
        Command::Bench(args) => bench_cmd::run(args),
        Command::Budget(args) => budget::run(args),
        Command::Demo(args) => demo::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
