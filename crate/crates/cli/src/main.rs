use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use convex_holes::harness::{
    run_and_write, summary_path, ExperimentConfig, ExperimentKind, HarnessError, Overrides,
};

/// Seeded experiments on largest empty convex polygons in random point sets.
#[derive(Parser)]
#[command(name = "convex-holes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Largest hole size against n.
    Growth(RunArgs),
    /// Largest hole size across regions.
    Shape(RunArgs),
    /// Exact and sampled convex-position probabilities.
    Valtr(RunArgs),
    /// Strip construction behind the lower bound.
    LowerBound(RunArgs),
    /// Lattice quadrilaterals around the largest hole.
    UpperTrace(RunArgs),
    /// Lattice approximation checks on synthetic polygons.
    Prop1Fuzz(RunArgs),
    /// Counts of holes by size with two enumerators.
    Census(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Output CSV; the summary goes to `<out>.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated sizes (r values for valtr, one lattice n for prop1-fuzz).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Growth(a) => (ExperimentKind::Growth, a),
            Command::Shape(a) => (ExperimentKind::Shape, a),
            Command::Valtr(a) => (ExperimentKind::Valtr, a),
            Command::LowerBound(a) => (ExperimentKind::LowerBound, a),
            Command::UpperTrace(a) => (ExperimentKind::UpperTrace, a),
            Command::Prop1Fuzz(a) => (ExperimentKind::Prop1Fuzz, a),
            Command::Census(a) => (ExperimentKind::Census, a),
        }
    }
}

fn execute(kind: ExperimentKind, args: RunArgs) -> Result<i32, HarnessError> {
    let overrides = Overrides {
        master_seed: args.seed,
        trials: args.trials,
        output_path: args.out,
        worker_count: args.workers,
        n_values: args.n,
    };
    let cfg = ExperimentConfig::resolve(kind, args.config.as_deref(), &overrides)?;
    let (out, path) = run_and_write(&cfg)?;
    for a in &out.summary.assertions {
        println!(
            "{} {}: {}",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            a.detail
        );
    }
    println!(
        "wrote {} and {}",
        path.display(),
        summary_path(&path).display()
    );
    Ok(out.exit_code())
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    let code = execute(kind, args).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
