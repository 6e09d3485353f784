//! `rectempty`: generate point sets, verify structures against brute-force
//! oracles, and benchmark query latency and space.
//!
//! Exit codes: 0 success, 1 invariant violation, 2 usage or I/O error.

mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rectempty::pointfile::{read_points, write_points};
use rectempty::{sample_points, UnitPoint, WorkloadSpec};

#[derive(Parser)]
#[command(
    name = "rectempty",
    version,
    about = "Orthogonal emptiness structures for random points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write `n` uniform points to a file (`.bin` for binary, anything else CSV).
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a structure, replay a workload and compare every answer to an oracle.
    Verify(VerifyArgs),
    /// Measure build time, space and query latency, one row per n.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Structure {
    Rank1d,
    Slabtree,
    Quadrant,
    Rangetree,
    Main1,
    Main2,
    /// Linear scan; bench only.
    Oracle,
}

#[derive(Args, Clone)]
pub struct PointSource {
    /// Read points from a file instead of sampling.
    #[arg(long, conflicts_with = "n")]
    points: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Clone)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    structure: Structure,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 32.0)]
    c1: f64,
    /// Build grid cells on a thread pool.
    #[arg(long)]
    parallel_build: bool,
}

#[derive(Args, Clone)]
pub struct WorkloadArgs {
    #[arg(long, default_value_t = 100_000)]
    queries: usize,
    #[arg(long, default_value_t = 1e-6)]
    area_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    area_max: f64,
    #[arg(long, default_value_t = 7)]
    workload_seed: u64,
}

impl WorkloadArgs {
    fn spec(&self) -> Result<WorkloadSpec> {
        let spec = WorkloadSpec::log_uniform(self.queries, self.area_min, self.area_max, self.workload_seed);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: PointSource,
    #[command(flatten)]
    build: BuildArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Check every query of the structure's query space (quadrant: n <= 1024, slabtree: n <= 64).
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: PointSource,
    #[command(flatten)]
    build: BuildArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Comma-separated list of n; overrides --n and --points.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// Exit code 1 without an error message of our own.
struct Violation;

fn load(source: &PointSource) -> Result<Vec<UnitPoint>> {
    match (&source.points, source.n) {
        (Some(path), _) => {
            let pts = read_points(path)?;
            if pts.is_empty() {
                bail!("{}: no points", path.display());
            }
            Ok(pts)
        }
        (None, Some(n)) => Ok(sample_points(n as usize, source.seed)?),
        (None, None) => bail!("one of --points or --n is required"),
    }
}

fn parse_sweep(s: &str) -> Result<Vec<usize>> {
    let ns = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().with_context(|| format!("bad sweep entry `{t}`")))
        .collect::<Result<Vec<_>>>()?;
    if ns.is_empty() {
        bail!("--sweep needs at least one n");
    }
    if ns.contains(&0) {
        bail!("--sweep entries must be >= 1");
    }
    Ok(ns)
}

fn execute(cli: Cli) -> Result<std::result::Result<(), Violation>> {
    match cli.command {
        Command::Gen { n, seed, out } => {
            let pts = sample_points(n as usize, seed)?;
            write_points(&out, &pts)?;
            eprintln!("wrote {} points to {}", pts.len(), out.display());
            Ok(Ok(()))
        }
        Command::Verify(args) => {
            let pts = load(&args.source)?;
            let spec = args.workload.spec()?;
            let report = run::verify(&pts, args.source.seed, &args.build, &spec, args.exhaustive)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.violations() == 0 {
                Ok(())
            } else {
                Err(Violation)
            })
        }
        Command::Bench(args) => {
            let spec = args.workload.spec()?;
            let sources: Vec<Vec<UnitPoint>> = match &args.sweep {
                Some(s) => parse_sweep(s)?
                    .into_iter()
                    .map(|n| Ok(sample_points(n, args.source.seed)?))
                    .collect::<Result<_>>()?,
                None => vec![load(&args.source)?],
            };
            let mut rows = Vec::new();
            for pts in &sources {
                rows.push(run::bench(pts, &args.build, &spec)?);
            }
            match args.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
                Format::Csv => {
                    println!("{}", report::BenchRow::CSV_HEADER);
                    for r in &rows {
                        println!("{}", r.csv());
                    }
                }
            }
            Ok(Ok(()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Violation)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
