use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sinkhorn_core::Side;

#[derive(Parser, Debug)]
#[command(name = "sinkhorn", version, about = "Alternating row/column matrix scaling with exact termination checks")]
pub struct Cli {
    /// Output encoding
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    pub output: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Alternate column and row scalings until the target marginals are met
    Scale(ScaleArgs),
    /// Decide after how many exact scalings the matrix becomes doubly stochastic
    Classify(ClassifyArgs),
    /// Look for a permutation whose diagonal avoids every zero entry
    Support(SupportArgs),
    /// Randomized search for matrices needing three or more scalings
    Falsify(FalsifyArgs),
    /// Sample the sign inequality behind the termination bound
    LemmaCheck(LemmaArgs),
    /// Generate a matrix with a known termination class
    Gen(GenArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Approx,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstSide {
    Row,
    Column,
}

impl From<FirstSide> for Side {
    fn from(side: FirstSide) -> Side {
        match side {
            FirstSide::Row => Side::Row,
            FirstSide::Column => Side::Column,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    OneStep,
    TwoStep,
}

impl GenKind {
    pub fn name(self) -> &'static str {
        match self {
            GenKind::OneStep => "one-step",
            GenKind::TwoStep => "two-step",
        }
    }
}

#[derive(Args, Debug)]
pub struct MatrixInput {
    /// Matrix file, JSON when the extension is .json and CSV otherwise
    #[arg(long, value_name = "PATH", required_unless_present = "inline", conflicts_with = "inline")]
    pub matrix: Option<PathBuf>,

    /// Matrix written inline, rows separated by ';' as in "3,6;5,10"
    #[arg(long, value_name = "ROWS", allow_hyphen_values = true)]
    pub inline: Option<String>,

    /// Row marginals as "1,1" or a file of values
    #[arg(long, value_name = "LIST")]
    pub r: Option<String>,

    /// Column marginals as "1,1" or a file of values
    #[arg(long, value_name = "LIST")]
    pub c: Option<String>,
}

#[derive(Args, Debug)]
pub struct ScaleArgs {
    #[command(flatten)]
    pub input: MatrixInput,

    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,

    /// Side scaled first
    #[arg(long, value_enum, default_value_t = FirstSide::Column)]
    pub first: FirstSide,

    /// Marginal tolerance; must be 0 for the exact backend
    #[arg(long)]
    pub tol: Option<String>,

    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,

    /// Abort once an exact entry exceeds this many bits, 0 disables the guard
    #[arg(long, default_value_t = 1 << 20)]
    pub max_bits: u64,

    /// Print every scaling
    #[arg(long)]
    pub trace: bool,

    /// Include intermediate matrices in the trace
    #[arg(long, requires = "trace")]
    pub trace_matrices: bool,

    /// Extract the diagonal certificate from the first row-then-column pair
    #[arg(long)]
    pub certificate: bool,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: MatrixInput,

    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,

    /// Print the witnessing scalings
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug)]
pub struct SupportArgs {
    #[command(flatten)]
    pub input: MatrixInput,

    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,
}

#[derive(Args, Debug)]
pub struct FalsifyArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    #[arg(long, env = "SINKHORN_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Matrix sizes, inclusive, as "2..4" or "3"
    #[arg(long, default_value = "2..4")]
    pub n: String,

    /// Depth searched from each side
    #[arg(long, default_value_t = 6)]
    pub depth: usize,

    /// Probability that an entry is nonzero
    #[arg(long, default_value_t = 0.9)]
    pub density: f64,

    #[arg(long, default_value_t = 20)]
    pub numerator_max: i64,

    #[arg(long, default_value_t = 10)]
    pub denominator_max: i64,

    /// Draw random balanced marginals instead of all-ones
    #[arg(long)]
    pub random_marginals: bool,

    /// Redraw matrices without a nonzero diagonal
    #[arg(long)]
    pub require_support: bool,

    /// Worker threads, 0 for one per core
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,

    /// Report wall-clock time
    #[arg(long)]
    pub timing: bool,

    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,

    #[arg(long, env = "SINKHORN_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Vector lengths, inclusive, as "2..8" or "4"
    #[arg(long, default_value = "2..8")]
    pub n: String,

    /// Upper bound for the sampled coordinates of z
    #[arg(long, default_value_t = 5)]
    pub z_max: i64,

    #[arg(long, default_value_t = 20)]
    pub numerator_max: i64,

    #[arg(long, default_value_t = 10)]
    pub denominator_max: i64,

    /// Evaluate a single weight vector instead of sampling
    #[arg(long, value_name = "LIST", requires = "z", allow_hyphen_values = true)]
    pub c: Option<String>,

    #[arg(long, value_name = "LIST", requires = "c", allow_hyphen_values = true)]
    pub z: Option<String>,

    #[arg(long, value_enum, default_value_t = Backend::Exact)]
    pub backend: Backend,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,

    #[arg(long, env = "SINKHORN_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Size of the square all-ones target when --r and --c are omitted
    #[arg(long, default_value_t = 2)]
    pub size: usize,

    #[arg(long, value_name = "LIST")]
    pub r: Option<String>,

    #[arg(long, value_name = "LIST")]
    pub c: Option<String>,

    /// Also write the matrix and its marginals to a file
    #[arg(long, value_name = "PATH")]
    pub write: Option<PathBuf>,
}
