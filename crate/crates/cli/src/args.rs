use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable holding the default sweep worker count.
pub const WORKERS_ENV: &str = "LYAPBOUND_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "lyapbound",
    version,
    about = "Certified enclosures of Lyapunov exponents of expanding interval maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enclose the Lyapunov exponent of one map.
    Bound(BoundArgs),
    /// Enclosures over a parameter range of a map family.
    Sweep(SweepArgs),
    /// Sample the invariant density.
    Density(DensityArgs),
    /// Grid check of expansion and branch ranges.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct MapSelect {
    /// Built-in map: doubling, lanford, lanford_family, bent_tent, bent_baker, linear.
    #[arg(long)]
    pub map: Option<String>,
    /// Map definition file.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub select: MapSelect,
    /// Parameter of a built-in family, as `c=<value>` (or `n=<value>` for linear).
    #[arg(long)]
    pub param: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CertArgs {
    /// Refinement factor K of the sup-ratio certificate.
    #[arg(long, default_value_t = 4)]
    pub refine_factor: usize,
    /// Dense-grid factor G of the sup-ratio certificate.
    #[arg(long, default_value_t = 8)]
    pub grid_factor: usize,
    /// Tail-decay threshold; defaults to 10^(-digits/2).
    #[arg(long)]
    pub tail_threshold: Option<String>,
    /// Power-iteration cap; defaults to 100 * digits.
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value = "1e-3")]
    pub epsilon: String,
    /// Number of collocation nodes m.
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
    /// Decimal digits; defaults to ceil(2.5 (-log10 epsilon)) + 30.
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Monte-Carlo cross-check as `n_points,trials,seed`.
    #[arg(long)]
    pub check_monte_carlo: Option<String>,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// lanford_family or bent_tent.
    #[arg(long, default_value = "lanford_family")]
    pub family: String,
    #[arg(long, default_value = "0.001", allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, default_value = "0.99", allow_hyphen_values = true)]
    pub to: String,
    #[arg(long, default_value_t = 40)]
    pub count: usize,
    #[arg(long, default_value = "1e-3")]
    pub epsilon: String,
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads; defaults to $LYAPBOUND_WORKERS, then the CPU count.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
    #[arg(long, default_value_t = 40)]
    pub digits: u32,
    /// Number of equally spaced sample points, endpoints included.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long, default_value_t = 64)]
    pub digits: u32,
}
