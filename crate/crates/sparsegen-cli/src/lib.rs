//! Command-line front end for `sparsegen-core`: argument types, command
//! runners and the error-to-exit-code mapping. `main.rs` only parses and
//! prints.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod table;

pub use table::Table;

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Bad arguments, bad input files, or usage errors.
pub const EXIT_ARGUMENT: i32 = 2;
/// Size guard or unsupported mode.
pub const EXIT_CAPABILITY: i32 = 3;
/// Internal invariant breach or output failure.
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sparsegen_core::Error),
    #[error("input error: {0}")]
    Input(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use sparsegen_core::Error as E;
        match self {
            CliError::Core(E::Argument(_) | E::Dimension(_) | E::Parse(_)) | CliError::Input(_) => EXIT_ARGUMENT,
            CliError::Core(E::Capability(_)) => EXIT_CAPABILITY,
            CliError::Core(E::Invariant(_)) | CliError::Output(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sparsegen", version, about = "Sparse generator matrix codes from polar kernels")]
pub struct Cli {
    /// Worker threads; SPARSEGEN_THREADS overrides this. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every randomized command.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel figures of merit.
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Channel transforms.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Split a column or a whole G₂^{⊗n}.
    Split(SplitArgs),
    /// Exact rate-loss sweep.
    Gamma(GammaArgs),
    /// Construct a code and write its description.
    Build(BuildArgs),
    /// Monte-Carlo block error rates under SC decoding.
    Simulate(SimulateArgs),
    /// Exponent curves and the random coding exponent.
    Exponents(ExponentArgs),
    /// Splitting thresholds ε*, λ*, λ†.
    Thresholds,
    /// Check the min-split inequality on quasi-random points.
    VerifyIneq(IneqArgs),
    /// Sparsity-order tables for the built-in kernels.
    Tables(TablesArgs),
}

#[derive(Debug, Subcommand)]
pub enum KernelAction {
    Analyze(KernelArgs),
}

#[derive(Debug, Subcommand)]
pub enum ChannelAction {
    /// Bhattacharyya parameter and capacity along a path of −/+ transforms.
    Z(ChannelArgs),
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// g2, g3star, g4star, g3prime, g4prime, block:<l>, idlower:<l> or file:<path>.
    /// Defaults to the five built-in kernels.
    #[arg(long = "kernel")]
    pub kernels: Vec<String>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// bec:<ε>, bsc:<p> or file:<path>.
    #[arg(long)]
    pub channel: String,
    /// Transform path, e.g. `-+-`; `-` is the check channel, `+` the combined one.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub path: String,
    #[arg(long, default_value_t = sparsegen_core::channel_models::DEFAULT_ALPHABET_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitAlgo {
    Simple,
    Drs,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub w_ub: usize,
    #[arg(long, value_enum, default_value_t = SplitAlgo::Drs)]
    pub algo: SplitAlgo,
    /// Split only this column of G₂^{⊗n}.
    #[arg(long)]
    pub column: Option<usize>,
    /// Emit the split matrix in sparse text form instead of CSV.
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GammaAlgo {
    Simple,
    Drs,
    Adrs,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    #[arg(long, value_enum)]
    pub algo: GammaAlgo,
    #[arg(long)]
    pub n_min: usize,
    /// Defaults to `n_min`.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Sparsity orders λ; n_lub = ⌈nλ⌉.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Explicit weight bounds, used instead of λ.
    #[arg(long, value_delimiter = ',')]
    pub w_ub: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Design {
    /// Exact for BEC, Bhattacharyya bound otherwise.
    Auto,
    /// Exact density evolution / channel enumeration.
    Exact,
    /// BEC recursion on Z(W); an upper bound on every bit-channel Z.
    Bound,
}

#[derive(Debug, Args, Clone)]
pub struct CodeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// plain, simple, drs or adrs.
    #[arg(long, default_value = "plain")]
    pub mode: String,
    #[arg(long)]
    pub k: Option<usize>,
    /// Used when `k` is absent: K = round(rate · 2^n).
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub w_ub: Option<u64>,
    /// w_ub = 2^{⌈nλ⌉} when no explicit bound is given.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Design channel, bec:<ε> or bsc:<p>.
    #[arg(long)]
    pub design_channel: Option<String>,
    #[arg(long, value_enum, default_value_t = Design::Auto)]
    pub design: Design,
    #[arg(long, default_value_t = 0.0)]
    pub log2_n_prime: f64,
    #[arg(long, default_value_t = sparsegen_core::channel_models::DEFAULT_ALPHABET_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub code: CodeArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Code file written by `build`; otherwise the inline code options apply.
    #[arg(long)]
    pub code_file: Option<PathBuf>,
    #[command(flatten)]
    pub code: CodeArgs,
    /// Simulated channels; defaults to the design channel.
    #[arg(long = "channel")]
    pub channels: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Rle,
    Polar,
    Paired,
    RandomCoding,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Scaling exponent of the polar family.
    #[arg(long, default_value_t = 3.579)]
    pub mu: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Channel for the random coding exponent.
    #[arg(long, default_value = "bsc:0.1")]
    pub channel: String,
}

#[derive(Debug, Args)]
pub struct IneqArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichTable {
    /// G₂, G₃*, G₄*: the largest rate of polarization for their size.
    MaxRate,
    /// G₃′, G₄′: the smallest geometric-mean column weight order.
    SparseGm,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long, value_enum)]
    pub which: WhichTable,
}

/// What a command produces.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Table(Table),
    Text(String),
}

impl Output {
    pub fn render(&self) -> String {
        match self {
            Output::Table(t) => t.to_csv(),
            Output::Text(s) => s.clone(),
        }
    }
}

/// Thread count from SPARSEGEN_THREADS, falling back to the flag.
pub fn thread_count(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>, CliError> {
    match env {
        Some(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Input(format!("SPARSEGEN_THREADS must be a positive integer, got `{v}`"))),
        },
        None => match flag {
            Some(0) => Err(CliError::Input("--threads must be positive".into())),
            f => Ok(f),
        },
    }
}

/// Runs a parsed command line and returns its output.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    commands::dispatch(cli)
}
