use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathmc_core::cftp::DEFAULT_CAP;
use pathmc_core::{FamilyConstraint, FamilySpec, Functional, PathError, Result, StepParams, WeightMode};

#[derive(Parser, Debug)]
#[command(name = "pathmc", version, about = "Sample constrained lattice paths with the peak/valley chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Approximate samples from a forward run of the chain.
    Sample(SampleArgs),
    /// Exact samples by coupling from the past.
    Cftp(CftpArgs),
    /// List every member of a small family.
    Enumerate(EnumerateArgs),
    /// Run one brute-force check on a small family.
    Verify(VerifyArgs),
    /// Mixing-time experiments, as CSV.
    Mix(MixArgs),
    /// Time averages of a path functional.
    Stats(StatsArgs),
    /// Draw a path record as SVG or ASCII.
    Render(RenderArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Meander,
    Wall,
    Excursion,
    Culminating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    Quadratic,
    Uniform,
}

impl From<Weights> for WeightMode {
    fn from(w: Weights) -> Self {
        match w {
            Weights::Quadratic => WeightMode::Quadratic,
            Weights::Uniform => WeightMode::Uniform,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Path length. `mix` accepts a comma-separated list.
    #[arg(long, required = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub a: i64,
    #[arg(long, default_value_t = 1)]
    pub b: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub wall_h: Option<i64>,
    #[arg(long)]
    pub wall_r: Option<usize>,
    #[arg(long)]
    pub wall_s: Option<usize>,
}

impl FamilyArgs {
    pub fn spec_for(&self, n: usize) -> Result<FamilySpec> {
        let constraint = match self.family {
            FamilyName::Meander => FamilyConstraint::Meander,
            FamilyName::Excursion => FamilyConstraint::Excursion,
            FamilyName::Culminating => FamilyConstraint::Culminating,
            FamilyName::Wall => match (self.wall_h, self.wall_r, self.wall_s) {
                (Some(h), Some(r), Some(s)) => FamilyConstraint::Wall { h, r, s },
                _ => {
                    return Err(PathError::InvalidParams(
                        "wall family needs --wall-h, --wall-r and --wall-s".into(),
                    ))
                }
            },
        };
        FamilySpec::new(StepParams::new(n, self.a, self.b)?, constraint)
    }

    /// The family for commands that take a single `--n`.
    pub fn spec(&self) -> Result<FamilySpec> {
        match self.n.as_slice() {
            [n] => self.spec_for(*n),
            _ => Err(PathError::InvalidParams("expected a single value for --n".into())),
        }
    }

    pub fn specs(&self) -> Result<Vec<FamilySpec>> {
        self.n.iter().map(|&n| self.spec_for(n)).collect()
    }
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Chain steps; defaults to the step count that bounds the total
    /// variation by --tv-target.
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    pub tv_target: f64,
    #[arg(long, value_enum, default_value_t = Weights::Quadratic)]
    pub weights: Weights,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    /// Emit a trajectory record every K steps (single sample only).
    #[arg(long, value_name = "K")]
    pub trace: Option<u64>,
}

#[derive(Args, Debug)]
pub struct CftpArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Weights::Quadratic)]
    pub weights: Weights,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    /// Initial horizon.
    #[arg(long, default_value_t = 1)]
    pub tau0: u64,
    /// Largest horizon tried before giving up.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Print only the number of members.
    #[arg(long)]
    pub count: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Matrix,
    Geodesic,
    Curvature,
    Monotone,
    Sandwich,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Matrix => "matrix",
            Check::Geodesic => "geodesic",
            Check::Curvature => "curvature",
            Check::Monotone => "monotone",
            Check::Sandwich => "sandwich",
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = Weights::Quadratic)]
    pub weights: Weights,
    /// Iteration cap for the exact mixing time in the matrix check.
    #[arg(long, default_value_t = 1_000_000)]
    pub tmix_cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Mean,
    Median,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("method").required(true).args(["exact", "coupling"]))]
pub struct MixArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Exact mixing time from the transition matrix (small n).
    #[arg(long)]
    pub exact: bool,
    /// Forward coupling time of 0̂ and 1̂ over --samples seeds.
    #[arg(long)]
    pub coupling: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = Statistic::Mean)]
    pub statistic: Statistic,
    #[arg(long, value_enum, default_value_t = Weights::Quadratic)]
    pub weights: Weights,
    /// Step cap for coupling runs and exact iteration.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// One of final_height, max_height, area, peak_count.
    #[arg(long)]
    pub functional: Functional,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    pub tv_target: f64,
    #[arg(long, value_enum, default_value_t = Weights::Quadratic)]
    pub weights: Weights,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RenderFormat {
    Svg,
    Ascii,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// JSONL file of path records; stdin when omitted or "-".
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Which record of the input to draw (0-based).
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long, value_enum, default_value_t = RenderFormat::Svg)]
    pub format: RenderFormat,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 300)]
    pub height: u32,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
