use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "coverlab",
    version,
    about = "Cover-time experiments for random-walk and favor-least exploration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a generated graph as an adjacency list.
    Generate(EnvArgs),
    /// Monte Carlo for one policy: per-run CSV and summary JSON.
    Simulate(SimArgs),
    /// Exact value, asymptote or bound of a quantity.
    Exact(ExactArgs),
    /// Several policies on one environment with pairwise z-scores.
    Compare(SimArgs),
    /// One parameter swept over a list of values.
    Sweep(SweepArgs),
    /// Re-run the invocation recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Clone)]
pub struct EnvArgs {
    /// Environment kind (star, path, circle, clique, barbell, btree, grid1d,
    /// grid2d, grid3d, multiroom, toy_maze, hanoi, cont2d).
    #[arg(long)]
    pub env: String,
    /// Environment parameter `k=v`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Side length of the continuous square.
    #[arg(long = "D", value_name = "D")]
    pub side: Option<f64>,
    /// Cells per axis of the continuous square.
    #[arg(long = "M", value_name = "M")]
    pub cells: Option<usize>,
    #[arg(long, value_enum)]
    pub motion: Option<MotionArg>,
    /// Write outputs into this directory instead of only printing.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MotionArg {
    Brownian,
    Levy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Cover,
    Hit,
}

#[derive(Debug, Args, Clone)]
pub struct PolicyArgs {
    /// Policy, or a comma-separated list for compare/sweep
    /// (rw, nf, local-nf, persistent; uniform, approx-nf on cont2d).
    #[arg(long, default_value = "rw")]
    pub policy: String,
    /// Anchor node of local-nf; defaults to the fixed start node.
    #[arg(long)]
    pub anchor: Option<usize>,
    /// Repetition law of persistent: `harmonic`, `harmonic:Z` or `z:p,z:p,...`.
    #[arg(long, default_value = "harmonic")]
    pub pdist: String,
    /// Kernel half-width of approx-nf; defaults to the cell width.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "cover")]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 1000)]
    pub runs: u64,
    /// Seed base; required when the CI environment variable is set.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub step_cap: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Check the per-run cover bounds and report failures.
    #[arg(long)]
    pub check_bounds: bool,
}

#[derive(Debug, Args, Clone)]
pub struct SimArgs {
    #[command(flatten)]
    pub env: EnvArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// `k=v1,v2,...`
    #[arg(long)]
    pub sweep: String,
}

#[derive(Debug, Args, Clone)]
pub struct ExactArgs {
    #[command(flatten)]
    pub env: EnvArgs,
    /// rw-hitting, rw-cover, nf-cover, matthews-lower, matthews-upper,
    /// general-bound, persistent-t0, restricted-maze.
    #[arg(long)]
    pub quantity: String,
    /// Probability of a single repetition for persistent-t0.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct ReplayArgs {
    /// Path to a manifest.json written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory; defaults to the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
