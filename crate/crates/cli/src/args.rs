use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netroles::features::{Operator, PrimitiveKind, PruneRule, SimilarityMeasure};
use netroles::roles::Criterion;

#[derive(Debug, Parser)]
#[command(
    name = "netroles",
    version,
    about = "Feature-based structural role discovery"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a pruned recursive feature matrix from an edge list.
    Learn(LearnArgs),
    /// Choose the number of roles and fit a role model to a feature matrix.
    SelectRank(SelectArgs),
    /// Write node role assignments from a fitted model.
    Assign(AssignArgs),
    /// Apply a fitted model to another graph.
    Transfer(TransferArgs),
    /// Apply a fitted model to a sequence of graph snapshots.
    Dynamic(DynamicArgs),
    /// Exact equivalence classes of a small graph.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct GraphInput {
    /// Edge list: `u v` or `u v w` per line.
    pub graph: PathBuf,
    /// Treat edges as directed.
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// Recorded in run.json; only randomized steps use it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[command(flatten)]
    pub input: GraphInput,
    /// Comma-separated primitives; defaults to the standard set for the
    /// graph's directedness.
    #[arg(long, value_delimiter = ',')]
    pub primitives: Option<Vec<PrimitiveKind>>,
    #[arg(long, value_delimiter = ',', default_value = "sum,mean")]
    pub operators: Vec<Operator>,
    #[arg(long, default_value_t = 0.5, value_parser = open_unit)]
    pub bin_fraction: f64,
    #[arg(long, default_value_t = 1.0, value_parser = half_open_unit)]
    pub lambda: f64,
    /// Maximum rounds, counting the primitive round.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub maxiter: u64,
    #[arg(long, value_enum, default_value_t = Similarity::Bins)]
    pub similarity: Similarity,
    #[arg(long, value_enum, default_value_t = Keep::Earliest)]
    pub keep: Keep,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Similarity {
    /// Agreement rate of vertical log bins.
    Bins,
    /// Absolute Pearson correlation of raw values.
    Pearson,
}

impl From<Similarity> for SimilarityMeasure {
    fn from(s: Similarity) -> Self {
        match s {
            Similarity::Bins => SimilarityMeasure::BinAgreement,
            Similarity::Pearson => SimilarityMeasure::Pearson,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Keep {
    /// Lowest feature id per redundant group.
    Earliest,
    /// Feature least correlated with the rest of the matrix.
    LeastCorrelated,
}

impl From<Keep> for PruneRule {
    fn from(k: Keep) -> Self {
        match k {
            Keep::Earliest => PruneRule::Earliest,
            Keep::LeastCorrelated => PruneRule::LeastCorrelated,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Feature CSV written by `learn`.
    pub features: PathBuf,
    /// Descriptor JSON written by `learn`; needed later by `transfer` and
    /// `dynamic`.
    #[arg(long)]
    pub descriptors: Option<PathBuf>,
    #[arg(long, default_value_t = Criterion::Mdl)]
    pub criterion: Criterion,
    /// Bits per stored value in the description-length cost.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub bits: u32,
    /// Consecutive non-improving ranks before the search stops.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Fit this rank instead of searching.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub rank: Option<u64>,
    /// Factorizations per rank; extra ones start from fresh random factors.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    pub nmf_maxiter: u64,
    #[arg(long, default_value_t = 1e-6, value_parser = non_negative)]
    pub nmf_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Mode {
    /// One role per node.
    #[arg(long, conflicts_with = "soft")]
    pub hard: bool,
    /// Per-node distribution over roles (default).
    #[arg(long)]
    pub soft: bool,
}

#[derive(Debug, Args)]
pub struct AssignArgs {
    /// Model JSON written by `select-rank`.
    pub model: PathBuf,
    #[command(flatten)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub input: GraphInput,
    /// Upper bound on normalized feature values.
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub clamp: f64,
    #[command(flatten)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DynamicArgs {
    pub model: PathBuf,
    /// Directory of edge lists (ordered by file name) or a manifest with one
    /// `path` or `timestamp path` per line.
    pub snapshots: PathBuf,
    #[arg(long)]
    pub directed: bool,
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub clamp: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[arg(long, value_enum)]
    pub kind: OracleKind,
    #[arg(long, value_enum, default_value_t = Variant::Strict)]
    pub variant: Variant,
    #[arg(long, value_enum, default_value_t = Refinement::Set)]
    pub refinement: Refinement,
    /// Starting partition for `regular`.
    #[arg(long, value_enum, default_value_t = Initial::Single)]
    pub initial: Initial,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleKind {
    Structural,
    Automorphic,
    Regular,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Variant {
    Strict,
    Weak,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Refinement {
    Set,
    Multiset,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Initial {
    Single,
    Degree,
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn half_open_unit(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1]"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is negative"))
    }
}
