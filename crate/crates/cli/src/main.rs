//! `ggs` command-line front end.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit status for malformed invocations (EX_USAGE).
pub const EXIT_USAGE: u8 = 64;
/// Exit status for unreadable input files (EX_NOINPUT).
pub const EXIT_NO_INPUT: u8 = 66;
/// Exit status when a solve stops on the iteration cap.
pub const EXIT_CAPPED: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ggs",
    version,
    about = "Greedy coordinate-descent least-squares solvers and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one least-squares problem and report iterations and accuracy.
    Solve(SolveArgs),
    /// Run the repeated-trial comparison for every row of a manifest.
    Bench(BenchArgs),
    /// Check a greedy Gauss-Seidel run against its convergence bounds.
    VerifyBounds(VerifyArgs),
    /// Write a random test problem as MatrixMarket plus vector files.
    Gen(GenArgs),
    /// Print shape, density, and condition number of a matrix file.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct SourceArgs {
    /// MatrixMarket file holding A.
    #[arg(group = "source")]
    matrix: Option<std::path::PathBuf>,

    /// Gaussian A with M rows and N columns drawn from SEED.
    #[arg(long, num_args = 3, value_names = ["M", "N", "SEED"], group = "source")]
    random: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct RhsArgs {
    /// Right-hand side file, one value per line; the solution is unknown.
    #[arg(long)]
    rhs: Option<std::path::PathBuf>,

    /// b = A x* for a random x*.
    #[arg(long)]
    consistent: bool,

    /// b = A x* + r0 with r0 a nonzero vector in the null space of A^T.
    #[arg(long)]
    inconsistent: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,

    #[command(flatten)]
    rhs: RhsArgs,

    /// ggs, ggs-randomized, grcd, or rgs.
    #[arg(long, default_value = "ggs")]
    method: String,

    /// Stopping tolerance on RES (or the relative gradient when x* is unknown).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    #[arg(long = "max-iters", default_value_t = 200_000)]
    max_iters: usize,

    /// Seed for x*, r0, and randomized selection (defaults to the --random seed, else 0).
    #[arg(long)]
    seed: Option<u64>,

    /// Write the convergence curve (iteration, gradient, RES) as CSV.
    #[arg(long)]
    trace: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Experiment manifest: `label source rhs [seed]` per line.
    manifest: std::path::PathBuf,

    #[arg(long, default_value_t = 50)]
    repeats: usize,

    /// Base seed; trial t runs the solvers with seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Directory for tables, per-trial records, curves, and bound rows.
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    /// csv or markdown.
    #[arg(long, default_value = "csv")]
    format: String,

    /// Comma-separated methods; the first two columns of the speed-up are GRCD over GGS.
    #[arg(long, default_value = "ggs,grcd")]
    methods: String,

    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    #[arg(long = "max-iters", default_value_t = 200_000)]
    max_iters: usize,

    /// Worker threads for independent trials.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// With --rhs the reference solution is the least-squares solution of the file system.
    #[command(flatten)]
    rhs: RhsArgs,

    /// Only ggs carries deterministic bounds.
    #[arg(long, default_value = "ggs")]
    method: String,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long = "max-iters", default_value_t = 200_000)]
    max_iters: usize,

    /// Also write the report here.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Gaussian A with M rows and N columns drawn from SEED.
    #[arg(long, num_args = 3, value_names = ["M", "N", "SEED"], required = true)]
    random: Vec<u64>,

    #[arg(long, conflicts_with = "inconsistent")]
    consistent: bool,

    #[arg(long)]
    inconsistent: bool,

    /// Output directory for matrix.mtx, rhs.txt, and solution.txt.
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Debug, Args)]
struct InfoArgs {
    matrix: std::path::PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Bench(a) => commands::bench(a),
        Command::VerifyBounds(a) => commands::verify_bounds(a),
        Command::Gen(a) => commands::gen(a),
        Command::Info(a) => commands::info(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
