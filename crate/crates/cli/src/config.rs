//! Experiment configuration: one value per run, embedded verbatim in its report.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sievelab::checkers::TheoremId;

pub const CONFIG_SCHEMA: &str = "sievelab/config/v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "config_schema")]
    pub schema: String,
    pub command: Command,
    /// Worker threads; `None` uses every core.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Seed for every sampled quantity in the run.
    #[serde(default)]
    pub seed: u64,
}

fn config_schema() -> String {
    CONFIG_SCHEMA.into()
}

impl ExperimentConfig {
    pub fn new(command: Command, workers: Option<usize>, seed: u64) -> Self {
        ExperimentConfig { schema: CONFIG_SCHEMA.into(), command, workers, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Compute the admissible set of a family.
    Sieve(SieveArgs),
    /// Structural report for a set: progression, covers, GAP witness, energy.
    Analyze(AnalyzeArgs),
    /// Write a generated family and its prediction sheet.
    Construct(ConstructArgs),
    /// Check one theorem's hypotheses and conclusion on a family.
    Verify(VerifyArgs),
    /// Subset-sum distribution of a set modulo a prime.
    SubsetSums(SubsetSumArgs),
    /// Run every fixture in a corpus directory.
    Suite(SuiteArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sieve(_) => "sieve",
            Command::Analyze(_) => "analyze",
            Command::Construct(_) => "construct",
            Command::Verify(_) => "verify",
            Command::SubsetSums(_) => "subset-sums",
            Command::Suite(_) => "suite",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SieveMode {
    Brute,
    #[default]
    Fast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SieveArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, value_enum, default_value_t = SieveMode::Fast)]
    #[serde(default)]
    pub mode: SieveMode,
    /// Also write the admissible set as a set file.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeArgs {
    /// A set file, or inline elements such as `0,5,10,21`.
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 4)]
    #[serde(default = "default_cover_k")]
    pub cover_kmax: usize,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_gap_rank")]
    pub gap_rank: usize,
}

fn default_cover_k() -> usize {
    4
}

fn default_gap_rank() -> usize {
    2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    IntervalSharp,
    HalfPower,
    ThinPrimes,
    Flush,
    Pell,
    KapNonunion,
    IntervalSieveSharp,
    KapSieveSmallP0,
    /// The same progression `{start + j step : j < len}` at every prime in `[y, 2y]`.
    Uniform,
}

/// Parameters for `construct`; absent fields take per-construction defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q2: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_high: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub len: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// JSON parameter file; see the format notes for the fields.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PathBuf>,
    /// Parameters resolved from `params` and the defaults; filled in by the run
    /// so that a replay does not need the parameter file.
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved: Option<ConstructParams>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Theorem-specific knobs shared by `verify` and corpus fixtures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CheckOptions {
    /// Number of progressions per residue set (`kap`, `kap-sieve`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Smallest sieving prime (`interval-sieve`, `kap-sieve`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<u64>,
    /// Energy or density parameter as `num/den` (`energy`, `inverse-gap`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    /// Checks the relaxed prime-count form of `kap` with this `delta`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<String>,
    /// GAP rank allowed for `R_p` (`inverse-gap`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Random instances for `gcd-lemma`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, value_parser = parse_theorem)]
    pub theorem: TheoremId,
    /// JSON file overriding the surrogate constants.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<PathBuf>,
    /// The set `S` for theorems about a set (defaults to the admissible set).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    /// Prediction sheet to evaluate against the admissible set.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions: Option<PathBuf>,
    #[command(flatten)]
    #[serde(default)]
    pub options: CheckOptions,
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse::<TheoremId>().map_err(|_| {
        let ids: Vec<&str> = TheoremId::ALL.iter().map(|t| t.as_str()).collect();
        format!("unknown theorem id; expected one of {}", ids.join(", "))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SubsetSumArgs {
    /// A set file, or inline elements.
    #[arg(long)]
    pub set: String,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<PathBuf>,
    /// Scan frequencies for short-progression concentration.
    #[arg(long)]
    #[serde(default)]
    pub scan: bool,
    /// Concentration threshold; defaults to `1/(4 ceil(sqrt p))`.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SuiteArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Rewrite each fixture's pinned diagnostics with the current values.
    #[arg(long)]
    #[serde(default)]
    pub pin: bool,
}
