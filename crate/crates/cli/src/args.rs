//! Command-line arguments. Options may also come from a `key=value` file
//! named by `--config`; flags given on the command line take precedence.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "twosource", version, about = "Error probabilities for telling one point source from two")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asymptotic error exponents versus separation.
    #[command(args_override_self = true)]
    Exponents(ExponentsArgs),
    /// Error probabilities given L detected photons, swept over d².
    #[command(args_override_self = true)]
    Conditional(ConditionalArgs),
    /// Error probabilities versus detected photon number at fixed d.
    #[command(args_override_self = true)]
    Photons(PhotonsArgs),
    /// Error probabilities over M temporal modes, swept over d.
    #[command(args_override_self = true)]
    Unconditional(UnconditionalArgs),
    /// Monte Carlo estimates next to the analytic values.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Prior probability of a single source.
    #[arg(long, default_value_t = 0.5)]
    pub p1: f64,
    /// `gaussian` or `file:<path>` for a sampled amplitude grid.
    #[arg(long, default_value = "gaussian")]
    pub psf: String,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key=value` file supplying defaults for any option.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Range {
    /// Explicit values; overrides the range.
    #[arg(long = "d", value_delimiter = ',', num_args = 1..)]
    pub d: Vec<f64>,
    #[arg(long = "d-min", default_value_t = 0.0)]
    pub d_min: f64,
    #[arg(long = "d-max", default_value_t = 6.0)]
    pub d_max: f64,
    #[arg(long = "d-step", default_value_t = 0.1)]
    pub d_step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentsArgs {
    #[command(flatten)]
    pub range: Range,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ConditionalArgs {
    /// Detected photon number.
    #[arg(long = "L", default_value_t = 5)]
    pub photons: u64,
    /// Explicit separations; overrides the d² range.
    #[arg(long = "d", value_delimiter = ',', num_args = 1..)]
    pub d: Vec<f64>,
    #[arg(long = "d2-min", default_value_t = 0.0)]
    pub d2_min: f64,
    #[arg(long = "d2-max", default_value_t = 20.0)]
    pub d2_max: f64,
    #[arg(long = "d2-step", default_value_t = 0.5)]
    pub d2_step: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct PhotonsArgs {
    #[arg(long = "d", value_delimiter = ',', num_args = 1.., default_values_t = [0.5, 2.0])]
    pub d: Vec<f64>,
    /// Explicit photon numbers; overrides the range.
    #[arg(long = "L", value_delimiter = ',', num_args = 1..)]
    pub photons: Vec<u64>,
    #[arg(long = "L-min", default_value_t = 0)]
    pub l_min: u64,
    #[arg(long = "L-max", default_value_t = 30)]
    pub l_max: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct UnconditionalArgs {
    #[command(flatten)]
    pub range: Range,
    /// Temporal mode counts.
    #[arg(long = "M", value_delimiter = ',', num_args = 1.., default_values_t = [100, 500, 1000])]
    pub modes: Vec<u64>,
    /// Photon rate per temporal mode.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Schemes to simulate: bspade, sliver, direct.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = ["bspade".to_string(), "sliver".to_string(), "direct".to_string()])]
    pub scheme: Vec<String>,
    /// simplified or lrt; defaults to simplified for bspade/sliver and lrt for direct.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long = "d", value_delimiter = ',', num_args = 1.., default_values_t = [2.0])]
    pub d: Vec<f64>,
    /// Condition on these photon numbers.
    #[arg(long = "L", value_delimiter = ',', num_args = 1..)]
    pub photons: Vec<u64>,
    /// Simulate these temporal mode counts instead.
    #[arg(long = "M", value_delimiter = ',', num_args = 1..)]
    pub modes: Vec<u64>,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Trials per hypothesis.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Exponents(a) => &a.common,
            Command::Conditional(a) => &a.common,
            Command::Photons(a) => &a.common,
            Command::Unconditional(a) => &a.common,
            Command::Simulate(a) => &a.common,
        }
    }
}
