//! Command-line flags, the optional TOML config file, and their merge.
//!
//! Every flag is optional at parse time so that a config file can supply it.
//! Precedence is flag, then config file, then built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_POWER: f64 = 100.0;
pub const DEFAULT_SIGMA: f64 = 1.0;
pub const DEFAULT_RHOZ: f64 = -1.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DELTA: f64 = 0.2;
pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_P_START: f64 = 1e2;
pub const DEFAULT_P_STOP: f64 = 1e10;
pub const DEFAULT_PER_DECADE: u32 = 4;
pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_BLOCK_LENGTH: u32 = 20;
pub const DEFAULT_RATE_FRACTION: f64 = 0.5;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "prelog", version, about = "Feedback coding laboratory for the two-user Gaussian broadcast channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fixed point, gap and rates at one power level.
    Analyze(AnalyzeArgs),
    /// Rates and pre-log ratio over a logarithmic power grid.
    Sweep(SweepArgs),
    /// Monte Carlo campaign of the coding scheme.
    Simulate(SimulateArgs),
    /// High-power limit checks over a logarithmic power grid.
    Verify(VerifyArgs),
    /// Pre-log class of a K-receiver noise correlation matrix.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML file with default values for any flag (keys as flag names).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub sigma1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2: Option<f64>,
    /// Noise correlation coefficient in [-1, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub rhoz: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub p_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_stop: Option<f64>,
    #[arg(long)]
    pub points_per_decade: Option<u32>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub power: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub power: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub block_length: Option<u32>,
    /// Rate of user 1 in bits per channel use; requires --rate2.
    #[arg(long, allow_negative_numbers = true)]
    pub rate1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rate2: Option<f64>,
    /// Both rates as this fraction of the achievable pair at the fixed point.
    #[arg(long, allow_negative_numbers = true)]
    pub rate_fraction: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Receiver whose output reaches the encoder in limited mode.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub fed_back_receiver: Option<u8>,
    /// Starting correlation of the coefficient schedule.
    #[arg(long, value_enum)]
    pub init: Option<InitArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the summary record here instead of standard output.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Plain-text matrix: one row per line, whitespace-separated entries.
    pub matrix: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Broadcast,
    Interference,
    Limited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Natural,
    FixedPoint,
}

impl ModeArg {
    pub fn name(self) -> &'static str {
        match self {
            ModeArg::Broadcast => "broadcast",
            ModeArg::Interference => "interference",
            ModeArg::Limited => "limited",
        }
    }
}

impl InitArg {
    pub fn name(self) -> &'static str {
        match self {
            InitArg::Natural => "natural",
            InitArg::FixedPoint => "fixed-point",
        }
    }
}

/// Contents of a `--config` file. Keys mirror the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub power: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub rhoz: Option<f64>,
    pub tol: Option<f64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub p_start: Option<f64>,
    pub p_stop: Option<f64>,
    pub points_per_decade: Option<u32>,
    pub trials: Option<u64>,
    pub block_length: Option<u32>,
    pub rate1: Option<f64>,
    pub rate2: Option<f64>,
    pub rate_fraction: Option<f64>,
    pub mode: Option<ModeArg>,
    pub fed_back_receiver: Option<u8>,
    pub init: Option<InitArg>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))
    }
}

/// First of flag, file value, default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub struct Noise {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rhoz: f64,
}

impl NoiseArgs {
    pub fn resolve(&self, file: &FileConfig) -> Noise {
        Noise {
            sigma1: pick(self.sigma1, file.sigma1, DEFAULT_SIGMA),
            sigma2: pick(self.sigma2, file.sigma2, DEFAULT_SIGMA),
            rhoz: pick(self.rhoz, file.rhoz, DEFAULT_RHOZ),
        }
    }
}

pub struct Grid {
    pub p_start: f64,
    pub p_stop: f64,
    pub per_decade: u32,
}

impl GridArgs {
    pub fn resolve(&self, file: &FileConfig) -> Grid {
        Grid {
            p_start: pick(self.p_start, file.p_start, DEFAULT_P_START),
            p_stop: pick(self.p_stop, file.p_stop, DEFAULT_P_STOP),
            per_decade: pick(self.points_per_decade, file.points_per_decade, DEFAULT_PER_DECADE),
        }
    }
}
