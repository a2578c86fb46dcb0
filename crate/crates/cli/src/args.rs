use clap::{Args, Parser, Subcommand, ValueEnum};
use rpod::detector::VoteMode;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rpod", version, about = "Random-projection outlier detection for high-dimensional Gaussian data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate the decision constants (a, b) for a design and cache them.
    Calibrate(CalibrateArgs),
    /// Scan a CSV sample repeatedly and vote on which rows are outliers.
    Detect(DetectArgs),
    /// Run level, power, masking or clean-sample experiments.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed; recorded in every output.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
    /// Directory holding the calibration cache.
    #[arg(long, default_value = ".rpod-cache")]
    pub cache_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Design {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Target mean number of projections at the threshold radius.
    #[arg(long = "target-projections", default_value_t = 50.0)]
    pub h: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantSource {
    /// JSON file with decision constants or a calibration result.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub constants_file: Option<PathBuf>,
    /// Lower decision constant.
    #[arg(long, requires = "b")]
    pub a: Option<f64>,
    /// Upper decision constant.
    #[arg(long, requires = "a")]
    pub b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[command(flatten)]
    pub design: Design,
    /// Monte Carlo size for the initial score quantiles.
    #[arg(long, default_value_t = rpod::calibration::calibrate::DEFAULT_MC_SIZE)]
    pub mc_size: usize,
    /// Replicates per level evaluation during bisection.
    #[arg(long, default_value_t = rpod::calibration::calibrate::DEFAULT_LEVEL_REPS)]
    pub level_reps: usize,
    /// Recompute even when the cache has this key.
    #[arg(long)]
    pub force: bool,
    /// Also write the summary as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VoteModeArg {
    Proportional,
    Strengthened,
    Relaxed,
}

impl From<VoteModeArg> for VoteMode {
    fn from(m: VoteModeArg) -> Self {
        match m {
            VoteModeArg::Proportional => VoteMode::Proportional,
            VoteModeArg::Strengthened => VoteMode::Strengthened,
            VoteModeArg::Relaxed => VoteMode::Relaxed,
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// CSV file, one observation per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of independent scans.
    #[arg(long = "T", default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub runs: u32,
    #[arg(long, value_enum, default_value_t = VoteModeArg::Proportional)]
    pub vote_mode: VoteModeArg,
    #[command(flatten)]
    pub design: Design,
    #[command(flatten)]
    pub constants: ConstantSource,
    /// Write the JSON report here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaperTable {
    #[value(name = "5")]
    Level,
    #[value(name = "6")]
    Power,
    #[value(name = "7")]
    Clean,
    Masking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Desk,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentArg {
    Level,
    Contamination,
    Clean,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Run a preset grid instead of a single cell.
    #[arg(long, value_enum, conflicts_with_all = ["experiment", "constants_file", "a", "b"])]
    pub paper_table: Option<PaperTable>,
    #[arg(long, value_enum, default_value_t = Scale::Desk)]
    pub scale: Scale,
    #[arg(long, value_enum, default_value_t = ExperimentArg::Level)]
    pub experiment: ExperimentArg,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub d: usize,
    /// identity, sigma1..sigma4, exp-decay, random-gram.
    #[arg(long, default_value = "identity")]
    pub covariance: String,
    /// Radius of the tested point as a multiple of the threshold (level runs).
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Planted radii for contamination runs, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Replicates per cell; defaults to the scale's size.
    #[arg(long)]
    pub reps: Option<usize>,
    #[command(flatten)]
    pub design: Design,
    #[command(flatten)]
    pub constants: ConstantSource,
    /// Directory for per-cell JSON, the combined JSON and the text table.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}
