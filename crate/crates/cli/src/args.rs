use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "plegma", version, about = "Thin families, plegma tuples, sequence-space norms and model domination")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here, with a CSV mirror beside it. Defaults to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Inspect a family or compute its rank.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Enumerate plegma or block tuples.
    #[command(subcommand)]
    Plegma(PlegmaCmd),
    /// Search for a monochromatic index set.
    #[command(subcommand)]
    Ramsey(RamseyCmd),
    /// Evaluate a norm.
    #[command(subcommand)]
    Norm(NormCmd),
    /// Extract and check spreading models.
    #[command(subcommand)]
    Sm(SmCmd),
    /// Build joins of several sequences.
    #[command(subcommand)]
    Join(JoinCmd),
    /// Classify a catalog under domination.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Re-run the configuration embedded in a report.
    #[serde(skip)]
    Replay {
        report: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Family(FamilyCmd::Inspect(_)) => "family inspect",
            Command::Family(FamilyCmd::Rank(_)) => "family rank",
            Command::Plegma(PlegmaCmd::Enum(_)) => "plegma enum",
            Command::Ramsey(RamseyCmd::Search(_)) => "ramsey search",
            Command::Norm(NormCmd::Eval(_)) => "norm eval",
            Command::Sm(SmCmd::Extract(_)) => "sm extract",
            Command::Sm(SmCmd::Joint(_)) => "sm joint",
            Command::Sm(SmCmd::Check(_)) => "sm check",
            Command::Join(JoinCmd::Build(_)) => "join build",
            Command::Join(JoinCmd::Weighted(_)) => "join weighted",
            Command::Order(OrderCmd::Matrix(_)) => "order matrix",
            Command::Order(OrderCmd::Chains(_)) => "order chains",
            Command::Replay { .. } => "replay",
        }
    }
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyCmd {
    /// Members, regularity and membership of a set.
    Inspect(InspectArgs),
    /// Symbolic rank, with a tree-rank cross-check on a window.
    Rank(RankArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InspectArgs {
    /// Family spec, e.g. `cube:2`, `uniform:w`, `explicit:@f.json`.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 10)]
    pub window: u32,
    /// Classify this set, e.g. `2,5`.
    #[arg(long)]
    pub set: Option<String>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankArgs {
    #[arg(long)]
    pub family: String,
    /// Window for the tree-rank recursion.
    #[arg(long, default_value_t = 8)]
    pub window: u32,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlegmaCmd {
    /// List `Plm_k` or `Bl_k` of a restricted family inside a window.
    Enum(EnumArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Plm,
    Bl,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumArgs {
    #[arg(long)]
    pub family: String,
    /// Index set, e.g. `all`, `evens`, `arith:3,2`, `prefix:1,4;all>=9`.
    #[arg(long, default_value = "all")]
    pub index_set: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub window: u32,
    #[arg(long, value_enum, default_value_t = Kind::Plm)]
    pub kind: Kind,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RamseyCmd {
    Search(SearchArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value = "all")]
    pub index_set: String,
    /// Tuple length.
    #[arg(long, default_value_t = 2)]
    pub arity: usize,
    /// `const:1`, `gapmod:2`, `minparity` or `table:@file.json`.
    #[arg(long)]
    pub coloring: String,
    #[arg(long)]
    pub target: usize,
    #[arg(long)]
    pub window: u32,
    #[arg(long, value_enum, default_value_t = Kind::Plm)]
    pub kind: Kind,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormCmd {
    Eval(EvalArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Oracle, e.g. `lp:2`, `tsirelson:1/2`, `dsum(sum; lp:1, c0)`.
    #[arg(long)]
    pub oracle: String,
    /// Vector as JSON `{"3": "1", "5": "-1/2"}`, or `@file.json`.
    #[arg(long)]
    pub vec: String,
}

/// Grid and tolerance shared by every extraction.
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridArgs {
    /// `standard` (all vectors over {0, ±1/2, ±1} plus random points) or `sampled:N`.
    #[arg(long, default_value = "standard")]
    pub grid: String,
    #[arg(long, default_value_t = 0)]
    pub grid_seed: u64,
    /// Longest coefficient vector.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value = "all")]
    pub index_set: String,
    /// Host oracle shared by the rules.
    #[arg(long)]
    pub host: String,
    /// Rule spec; repeat for several sequences.
    #[arg(long = "rule", required = true)]
    pub rules: Vec<String>,
    #[arg(long, default_value_t = 12)]
    pub window: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmCmd {
    /// Spreading-model estimate of the first rule.
    Extract(ModelArgs),
    /// Joint model of the interleaved rules, with its stability defect.
    Joint(ModelArgs),
    /// Extraction plus spreading, suppression and subordination checks.
    Check(CheckArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Assert that every rule is weakly null, so suppression must hold.
    #[arg(long)]
    pub declare_weakly_null: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JoinCmd {
    /// Join of the rules, checked against the sandwich bounds.
    Build(ModelArgs),
    /// Weighted join, checked against the K bounds and scaled domination.
    Weighted(WeightedArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Comma-separated positive weights `c_1, c_2, …`.
    #[arg(long)]
    pub weights: String,
    #[arg(long)]
    pub truncation: usize,
    /// Absolute tolerance for the scaled checks.
    #[arg(long, default_value = "1/1000000")]
    pub tol: String,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderCmd {
    /// Pairwise relation matrix with a Hasse-style listing.
    Matrix(OrderArgs),
    /// Longest chain and maximal antichains.
    Chains(OrderArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderArgs {
    /// Comma-separated handles (oracle syntax or `@estimate.json`), or
    /// `@catalog.json` holding a list of them.
    #[arg(long)]
    pub catalog: String,
    /// Largest all-ones test length.
    #[arg(long, default_value_t = 4096)]
    pub n_max: u32,
    /// The constant ladder runs up to `2^c_scan_log2`.
    #[arg(long, default_value_t = 10)]
    pub c_scan_log2: u32,
    #[arg(long, default_value_t = 3)]
    pub grid_k: usize,
    #[arg(long, default_value_t = 0)]
    pub grid_seed: u64,
}
