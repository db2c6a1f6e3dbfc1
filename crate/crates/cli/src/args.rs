use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mye_core::{ComparisonMode, LogBase};

/// Environment variable consulted when `--format` is not given.
pub const FORMAT_ENV: &str = "MYE_FORMAT";

#[derive(Debug, Parser)]
#[command(
    name = "mye",
    version,
    about = "Trend-preserving filters for multi-year estimates"
)]
pub struct Cli {
    /// Output format; defaults to $MYE_FORMAT, then to the command's natural format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design the filter family for a period set and degree, and verify it.
    Design(DesignArgs),
    /// Fill missing multi-year cells by random-walk imputation.
    Impute(ImputeArgs),
    /// Filtered trend estimates at one end year.
    Trends(TrendsArgs),
    /// Noise-signal ratios and compatibility measures.
    Compat(CompatArgs),
    /// Compare two regions at one end year.
    Compare(CompareArgs),
    /// Monte Carlo comparison bias under a polynomial trend.
    Simulate(SimulateArgs),
    /// Recompute the bundled three-county table and check it.
    Demo,
}

#[derive(Debug, Args)]
pub struct DesignOpts {
    /// Degree of the local polynomial trend to pass.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,

    /// Comma-separated period lengths.
    #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
    pub periods: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub design: DesignOpts,
}

#[derive(Debug, Args)]
pub struct ImputeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,

    /// Cells to fill as `period:year`, comma-separated (e.g. 3:2006,5:2007).
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_target)]
    pub targets: Vec<(u32, i32)>,
}

#[derive(Debug, Args)]
pub struct TrendsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,

    #[command(flatten)]
    pub design: DesignOpts,

    #[arg(long)]
    pub t0: i32,

    /// Impute these cells before filtering.
    #[arg(long, value_delimiter = ',', value_parser = parse_target)]
    pub impute: Vec<(u32, i32)>,
}

#[derive(Debug, Args)]
pub struct CompatArgs {
    #[arg(long = "in")]
    pub input: PathBuf,

    #[arg(long, value_delimiter = ',', default_value = "3,5")]
    pub periods: Vec<u32>,

    /// Logarithm base for the noise-signal ratio: 10 or e.
    #[arg(long, default_value = "10", value_parser = parse_log_base)]
    pub log_base: LogBase,

    /// Ignore imputed multi-year values.
    #[arg(long)]
    pub exclude_imputed: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Region with every period length.
    #[arg(long)]
    pub a: PathBuf,

    /// Second region; defaults to region A.
    #[arg(long)]
    pub b: Option<PathBuf>,

    #[arg(long, value_parser = parse_mode)]
    pub mode: ComparisonMode,

    #[arg(long)]
    pub t0: i32,

    /// Period used for region B.
    #[arg(long)]
    pub other_period: u32,

    /// Period used for region A; defaults to 1y (or A's shortest period in proper mode).
    #[arg(long)]
    pub reference_period: Option<u32>,

    #[command(flatten)]
    pub design: DesignOpts,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Trend coefficients a0,a1,... of μ_t = Σ a_j t^j.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub trend: Vec<f64>,

    /// Error standard deviation: a single value for every period, and/or
    /// `period:sd` entries (e.g. `0.5,3:1`).
    #[arg(long, default_value = "0")]
    pub noise: String,

    #[arg(long, value_parser = parse_mode)]
    pub mode: ComparisonMode,

    #[arg(long)]
    pub t0: i32,

    #[arg(long)]
    pub other_period: u32,

    #[arg(long)]
    pub reference_period: Option<u32>,

    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Filter degree for proper mode; defaults to the trend degree.
    #[arg(long)]
    pub degree: Option<usize>,

    #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
    pub periods: Vec<u32>,
}

fn parse_target(s: &str) -> Result<(u32, i32), String> {
    let (k, t) = s
        .split_once(':')
        .ok_or_else(|| format!("target {s:?} must look like period:year"))?;
    let k: u32 = k
        .trim()
        .parse()
        .map_err(|_| format!("bad period in {s:?}"))?;
    let t: i32 = t.trim().parse().map_err(|_| format!("bad year in {s:?}"))?;
    if k == 0 {
        return Err("period must be at least 1".into());
    }
    Ok((k, mye_core::myeseries::normalize_year(t)))
}

fn parse_log_base(s: &str) -> Result<LogBase, String> {
    s.parse().map_err(|e: mye_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<ComparisonMode, String> {
    s.parse().map_err(|e: mye_core::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets_parse() {
        assert_eq!(parse_target("3:06"), Ok((3, 2006)));
        assert_eq!(parse_target("5:2007"), Ok((5, 2007)));
        assert!(parse_target("0:2007").is_err());
        assert!(parse_target("2007").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
