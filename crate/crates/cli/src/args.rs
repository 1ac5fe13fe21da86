use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multicmh::sim::Scenario;
use multicmh::{Arity, ScanConfig};

#[derive(Debug, Parser)]
#[command(
    name = "multicmh",
    version,
    about = "Multiscale CMH test of conditional independence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the multiscale scan on a CSV file.
    Test(TestArgs),
    /// Direct CMH test of binary x and y over a medtree stratification of z.
    Cmh(CmhArgs),
    /// Run a simulation protocol.
    Sim(SimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArityArg {
    Binary,
    Continuous,
}

impl From<ArityArg> for Arity {
    fn from(a: ArityArg) -> Arity {
        match a {
            ArityArg::Binary => Arity::Binary,
            ArityArg::Continuous => Arity::Continuous,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Conditioning columns, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub z: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 10)]
    pub eta: usize,
    #[arg(long, default_value_t = 7)]
    pub kmax: usize,
    #[arg(long, default_value_t = 20)]
    pub v_all: usize,
    #[arg(long, default_value_t = 10)]
    pub v_margin: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub strata_floor: Option<usize>,
}

impl ScanArgs {
    pub fn config(&self) -> ScanConfig {
        ScanConfig {
            eta: self.eta,
            k_max: self.kmax,
            v_all: self.v_all,
            v_margin: self.v_margin,
            alpha: self.alpha,
            strata_floor: self.strata_floor,
            depths: None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; all cores when absent.
    #[arg(long, env = "MULTICMH_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Override the detected arity of x.
    #[arg(long, value_enum)]
    pub x_arity: Option<ArityArg>,
    #[arg(long, value_enum)]
    pub y_arity: Option<ArityArg>,
    /// Accepted for symmetry with `sim`; the scan itself is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CmhArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 10)]
    pub eta: usize,
    #[arg(long)]
    pub strata_floor: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    T1e,
    Roc,
    Scale,
    Eta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    NullPnl,
    AltPnl,
    PureNullGaussian,
    PlantedWindow,
}

impl From<Model> for Scenario {
    fn from(m: Model) -> Scenario {
        match m {
            Model::NullPnl => Scenario::NullPnl,
            Model::AltPnl => Scenario::AltPnl,
            Model::PureNullGaussian => Scenario::PureNullGaussian,
            Model::PlantedWindow => Scenario::PlantedWindow,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub scenario: Protocol,
    /// Data model; the null side for `roc` and `eta`. Defaults to
    /// `pure-null-gaussian` for `scale` and `null-pnl` otherwise.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Alternative side for `roc` and `eta`.
    #[arg(long, value_enum, default_value_t = Model::AltPnl)]
    pub alt_model: Model,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample sizes for `scale`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ns: Vec<usize>,
    /// η values for `eta`, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15, 20])]
    pub etas: Vec<usize>,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
