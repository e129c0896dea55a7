//! `lattice-ans`: capacities, coders, samplers, lattice codecs and the
//! reproduction report.
//!
//! Exit status: 0 success, 1 data error (bad input file, failed decode or
//! verification, failing report row), 2 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lattice-ans", version, about = "Constrained lattice capacities and near-capacity ANS coding")]
pub struct Cli {
    /// Seed for every pseudorandom choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for independent trials (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Table format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity of a model: 1D exactly, 2D through a width-n strip.
    Capacity(CapacityArgs),
    /// Maximal-entropy chain of a graph given as a weight matrix file.
    Merw(MerwArgs),
    /// Binary ABS coding of a file's bits.
    Abs(CoderArgs),
    /// Table ANS coding of a file's bytes.
    Ans(CoderArgs),
    /// Thermalized samples of a 2D model.
    Sample(SampleArgs),
    /// Exact, bounded or empirical pattern probabilities and pLOC checks.
    Describe(DescribeArgs),
    /// Strip models and the strip lattice codec.
    Strip(StripArgs),
    /// Filling over independent sets.
    Algo1(Algo1Args),
    /// Random-order filling with a charging profile.
    Algo2(Algo2Args),
    /// Computed values against the published tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Model preset: hard-square, k-model:<k>, no-111, free:<dim>:<alphabet>.
    #[arg(long, default_value = "hard-square")]
    pub model: String,
    /// Strip width for 2D models.
    #[arg(long, default_value_t = 12)]
    pub width: usize,
    /// Strip boundary for 2D models: cyclic or zero.
    #[arg(long, default_value = "cyclic")]
    pub boundary: String,
}

#[derive(Debug, Args)]
pub struct MerwArgs {
    /// Matrix file: `n`, then `n` rows of `n` weights.
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma-separated vertex path whose probability to print.
    #[arg(long)]
    pub path: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Encode,
    Decode,
}

#[derive(Debug, Args)]
pub struct CoderArgs {
    pub direction: Direction,
    /// Input file (default stdin).
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output file (default stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Probability of a 1 bit (abs only), e.g. 0.3 or 3/16.
    #[arg(long, default_value = "0.5")]
    pub q: String,
    /// `l = 2^R`.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Digit width `w`, `b = 2^w`.
    #[arg(long)]
    pub digit_bits: Option<u32>,
    /// Spread key (ans only).
    #[arg(long, default_value_t = 0)]
    pub key: u64,
    /// Adds a forbidden symbol of this probability (ans only).
    #[arg(long)]
    pub forbidden_eps: Option<f64>,
    /// Floor instead of ceiling ABS variant.
    #[arg(long)]
    pub floor: bool,
    /// Decode the encoder's output and compare with the input.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value = "hard-square")]
    pub model: String,
    #[arg(long, default_value_t = 20)]
    pub rows: usize,
    #[arg(long, default_value_t = 20)]
    pub cols: usize,
    /// free, zero or cyclic.
    #[arg(long, default_value = "free")]
    pub boundary: String,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Warm-up sweeps.
    #[arg(long, default_value_t = 5)]
    pub warmup: usize,
    /// Moves between samples (0: one sweep).
    #[arg(long, default_value_t = 0)]
    pub spacing: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DescribeMode {
    /// Counting description on a centered square.
    Exact,
    /// Low and high conditional probability over boundary valuations.
    Bounds,
    /// Frequencies in sample files.
    Empirical,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    pub mode: DescribeMode,
    #[arg(long, default_value = "hard-square")]
    pub model: String,
    /// Square sides, comma-separated (exact, bounds) or window side (empirical).
    #[arg(long, default_value = "5")]
    pub side: String,
    /// Pattern `r,c=s;r,c=s`, coordinates relative to the square center.
    #[arg(long, default_value = "0,0=1")]
    pub pattern: String,
    /// Sample files (empirical).
    #[arg(long)]
    pub input: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StripAction {
    Build,
    Capacity,
    Encode,
    Decode,
    Evaluate,
}

#[derive(Debug, Args)]
pub struct StripArgs {
    pub action: StripAction,
    #[arg(long, default_value = "hard-square")]
    pub model: String,
    /// Strip widths; comma-separated for capacity and evaluate.
    #[arg(long, default_value = "8")]
    pub width: String,
    /// cyclic or zero.
    #[arg(long, default_value = "cyclic")]
    pub boundary: String,
    /// Fixed column count for encode (default: fewest that fit).
    #[arg(long)]
    pub columns: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub precision: u32,
    #[arg(long, default_value_t = 0)]
    pub key: u64,
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Trials for evaluate.
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    /// Message bits per trial for evaluate.
    #[arg(long, default_value_t = 100_000)]
    pub bits: usize,
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct Algo1Args {
    /// Probability of a 1 on the first sublattice (default: optimal).
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 256)]
    pub side: usize,
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    #[arg(long, default_value_t = 16)]
    pub precision: u32,
    /// free, zero or cyclic.
    #[arg(long, default_value = "cyclic")]
    pub boundary: String,
}

#[derive(Debug, Args)]
pub struct Algo2Args {
    #[arg(long, default_value_t = 100)]
    pub side: usize,
    #[arg(long, default_value_t = 40)]
    pub trials: usize,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// free, zero or cyclic.
    #[arg(long, default_value = "cyclic")]
    pub boundary: String,
    /// Profile coefficients `c0,c1,...,c4`; fitted from thermalized
    /// samples when absent.
    #[arg(long)]
    pub profile: Option<String>,
    /// Thermalized samples for the fit.
    #[arg(long, default_value_t = 100)]
    pub fit_samples: usize,
    /// Writes `t,a,q,visits` here.
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value_t = 100)]
    pub side: usize,
    #[arg(long, default_value_t = 40)]
    pub trials: usize,
    #[arg(long, default_value_t = 100)]
    pub fit_samples: usize,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

pub fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

pub fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("config: {cli:?}");
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(m) | CliError::Data(m)) = &e;
            eprintln!("error: {m}");
            ExitCode::from(e.code())
        }
    }
}
