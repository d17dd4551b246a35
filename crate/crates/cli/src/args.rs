use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "testspaces",
    version,
    about = "Finite metric test spaces and embedding invariants"
)]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Generate a graph or metric space.
    Gen(GenArgs),
    /// All-pairs shortest paths of a graph file.
    Apsp(ApspArgs),
    /// Distortion of given vectors for a space.
    Distort(DistortArgs),
    /// Minimum distortion into Euclidean space.
    L2min(L2minArgs),
    /// Markov convexity functional of a built-in walk.
    Markov(MarkovArgs),
    /// δ-trees, broken lines, thickness and martingales.
    Rnp {
        #[command(subcommand)]
        #[serde(flatten)]
        command: RnpCommand,
    },
    /// Exhaustive searches.
    Oracle {
        #[command(subcommand)]
        #[serde(flatten)]
        command: OracleCommand,
    },
    /// Built-in embeddings as vectors.
    Embed(EmbedArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenFamily {
    Tree,
    Fork,
    Diamond,
    Laakso,
    Cycle,
    Product,
    Heisenberg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingArg {
    Unit,
    Scaled,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: GenFamily,
    /// Depth, level, cycle length or ball radius.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = WeightingArg::Unit)]
    pub weighting: WeightingArg,
    /// Tree depths of the factors of a product, e.g. `2,3`.
    #[arg(long, value_delimiter = ',')]
    pub depths: Vec<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct ApspArgs {
    /// Graph JSON file.
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    L1,
    L2,
    Linf,
    Summing,
}

#[derive(Args, Debug, Serialize)]
pub struct DistortArgs {
    /// Metric space or graph JSON file.
    #[arg(long)]
    pub space: PathBuf,
    /// CSV with one row per point.
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long, value_enum)]
    pub target: Target,
}

#[derive(Args, Debug, Serialize)]
pub struct L2minArgs {
    /// Metric space or graph JSON file.
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Also write the certified Gram matrix as CSV.
    #[arg(long)]
    pub emit_gram: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Walk {
    Tree,
    Diamond,
    Laakso,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Args, Debug, Serialize)]
pub struct MarkovArgs {
    #[arg(long, value_enum)]
    pub walk: Walk,
    /// `m` for the walk on `T_{2^m}`, otherwise the recursion level.
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Required for Monte Carlo.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Defaults to the number of edges on a source-sink geodesic.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, value_enum, default_value_t = WeightingArg::Unit)]
    pub weighting: WeightingArg,
    /// Run the generic dynamic program on the materialised tree.
    #[arg(long)]
    pub explicit: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "rnp")]
pub enum RnpCommand {
    /// Verify the Rademacher δ-tree of depth n.
    Tree {
        #[arg(long)]
        n: u32,
    },
    /// Broken lines of the bush built from the depth-n Rademacher tree.
    Lines {
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Thickness constant of the geodesic family of the weighted diamond.
    Thickness {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        budget: usize,
    },
    /// Divergent martingale from the tent embedding of the weighted diamond.
    Martingale {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Number of double steps.
        #[arg(long, default_value_t = 2)]
        steps: usize,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "oracle")]
pub enum OracleCommand {
    /// Least distortion of the cycle C_m into small unit trees.
    CycleTree {
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 6)]
        max_tree: usize,
        #[arg(long, default_value_t = 2_000_000_000)]
        budget: u64,
    },
    /// Infimum of the James ratio of the summing basis over a grid.
    JamesAlpha {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        lo: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        hi: i64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedKind {
    /// Tree into the summing norm.
    Bourgain,
    /// Distance rows of a space into ℓ∞.
    Frechet,
    /// Weighted diamond into ℓ₁.
    Tent,
}

#[derive(Args, Debug, Serialize)]
pub struct EmbedArgs {
    #[arg(long, value_enum)]
    pub kind: EmbedKind,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Space file for the Fréchet embedding.
    #[arg(long)]
    pub space: Option<PathBuf>,
}
