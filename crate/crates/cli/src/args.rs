use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Upper limit on tree sizes accepted from the command line.
pub const MAX_N: u64 = 1 << 31;
/// Largest `n` for `stats exact`, whose rows carry numbers with ~0.6 n digits.
pub const STATS_EXACT_MAX: u64 = 2000;

#[derive(Debug, Parser)]
#[command(
    name = "fringe",
    version,
    about = "Random binary trees, minimal DAGs and fringe-subtree statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample random trees, one per line.
    Generate(GenerateArgs),
    /// Compress trees into their minimal DAGs.
    Compress(CompressArgs),
    /// Exact tables or per-tree statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Evaluate the constants and the derived band constants.
    Constants(ConstantsArgs),
    /// Run a Monte Carlo experiment.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Uniform,
    Bst,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Number of leaves.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_N))]
    pub n: u64,
    #[arg(long)]
    pub seed: u64,
    /// Number of trees; tree i is drawn from stream i of the seed.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Write length-prefixed bit framing instead of text lines.
    #[arg(long)]
    pub binary: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ordered,
    Unordered,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompressFormat {
    /// CSV with one row per tree.
    Summary,
    /// One JSON document per tree and line.
    DagJson,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// File with one tree per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Read length-prefixed bit framing instead of text lines.
    #[arg(long)]
    pub binary: bool,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = CompressFormat::Summary)]
    pub format: CompressFormat,
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Exact counts and expectations for sizes 1..=n, as fractions.
    Exact {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=STATS_EXACT_MAX))]
        n: u64,
    },
    /// Structural statistics of each input tree.
    Tree(InputArgs),
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Significant digits of every reported real.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Counts,
    Concentration,
    Clt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterKind {
    /// Every tree of the size.
    All,
    /// `|Aut(t)| >= 2^(gamma k - k^(3/4))`.
    HighAut,
    /// `P_bst(t) <= 2^(-mu k + k^(3/4))`.
    LowBst,
    /// Both, with `nu` for the automorphism bound.
    BstIso,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Statistic {
    Log2AutUniform,
    Log2BstWeight,
    SymBst,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, value_enum, default_value_t = Model::Uniform)]
    pub model: Model,
    /// Tree size (for `clt`, the size k).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=MAX_N))]
    pub n: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0 / 6.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// `log4`, `logb` or a positive coefficient `a` (sizes `k >= a ln n`).
    #[arg(long, default_value = "log4")]
    pub cut_point: String,
    /// Multiplicative widening of the asymptotic bands.
    #[arg(long, default_value_t = 1.10)]
    pub slack: f64,
    /// Upper limit on n * trials.
    #[arg(long, default_value_t = fringe_core::experiment::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Smallest size for `concentration` (default: smallest admissible).
    #[arg(long)]
    pub k_min: Option<u64>,
    /// Largest size for `concentration` (default: largest admissible).
    #[arg(long)]
    pub k_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = FilterKind::All)]
    pub filter: FilterKind,
    /// Statistic for `clt`; it fixes the model. Default: log2_aut_uniform
    /// for uniform, log2_bst_weight for bst.
    #[arg(long, value_enum)]
    pub statistic: Option<Statistic>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}
