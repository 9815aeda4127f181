//! Command-line grammar and the JSON config file that mirrors it.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hornlab_core::rational::{parse_rational, Rational};
use hornlab_core::WitnessPolicy;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "hornlab", version, about = "Horn inequalities, quantile triples and self-characterising sets")]
pub struct Cli {
    /// JSON file of default flag values; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List U^n_r or T^n_r as JSON lines.
    Enumerate(EnumerateArgs),
    /// Membership verdict for a quantile triple.
    Check(CheckArgs),
    /// Approximate a triple by an embedded element of T^n_r.
    Approximate(ApproximateArgs),
    /// Random-matrix experiments.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Search a family of (n, r) levels for an inequality that also rejects a violating triple.
    Redundancy(RedundancyArgs),
    /// Self-characterising subsets of a finite relation.
    Sc(ScArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum SetKind {
    #[value(name = "U", alias = "u")]
    U,
    #[value(name = "T", alias = "t")]
    T,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum)]
    pub set: Option<SetKind>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Quantile triple JSON.
    pub input: Option<PathBuf>,
    /// Decide membership in H_n for an n-atomic triple instead of scanning by depth.
    #[arg(long)]
    pub n: Option<u32>,
    /// Largest level m of the T^m_r scan.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub witness_policy: Option<WitnessPolicy>,
}

#[derive(Debug, Args)]
pub struct ApproximateArgs {
    /// Quantile triple JSON with values in [0, 1].
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Perturbation size as "p/q"; defaults to max(1/r², 6/(nr)).
    #[arg(long)]
    pub eps: Option<String>,
    /// Round v to ceil(vn)-1 instead of floor(vn).
    #[arg(long)]
    pub strict_floor: bool,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Spectra of random Hermitian sums as JSON lines.
    Sample(OracleArgs),
    /// Horn margins of normalized samples, one CSV row per sample.
    Soundness(OracleArgs),
    /// Block-matrix Sudoku grids, one CSV row per grid.
    Sudoku(OracleArgs),
    /// Limiting Weyl and Ky Fan margins, one CSV row per sample and inequality.
    Asymptotic(OracleArgs),
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: Option<u32>,
    /// Seed of a single sample, or master seed of a batch.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Batch size; item i uses a seed derived from the master seed and i.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Scan depth for soundness checks.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Fixed α spectrum, comma separated (sample only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Fixed β spectrum, comma separated (sample only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct RedundancyArgs {
    /// Quantile triple JSON violating the target inequality.
    pub input: Option<PathBuf>,
    /// Target Horn triple JSON; defaults to ({1},{1},{1}) at n = 2.
    #[arg(long, value_name = "FILE")]
    pub target: Option<PathBuf>,
    /// Levels to search, as "n:r,n:r,...".
    #[arg(long)]
    pub family: Option<String>,
    /// Perturbation size for every level; defaults to 1/r².
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub strict_floor: bool,
}

#[derive(Debug, Args)]
pub struct ScArgs {
    /// Relation JSON: {"labels": [...], "likes": [[bool]]}.
    pub relation: PathBuf,
    #[command(subcommand)]
    pub action: ScAction,
}

#[derive(Debug, Subcommand)]
pub enum ScAction {
    /// Friendly and packed predicates of one subset.
    Check(SubsetArg),
    /// All self-characterising sets.
    Enumerate {
        #[arg(long, value_enum, default_value = "weak")]
        mode: ModeArg,
    },
    /// Greedy extension of a friendly set to a weakly self-characterising set.
    Extend(SubsetArg),
    /// Whether a unique weakly self-characterising set contains the subset.
    Unique(SubsetArg),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Weak,
    Strong,
}

#[derive(Debug, Args)]
pub struct SubsetArg {
    /// Comma-separated labels; empty for the empty set.
    #[arg(long, value_delimiter = ',', default_value = "")]
    pub subset: Vec<String>,
}

/// Flag defaults read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub n: Option<u32>,
    pub r: Option<u32>,
    pub set: Option<SetKind>,
    pub depth: Option<u32>,
    pub eps: Option<String>,
    pub seed: Option<u64>,
    pub seeds: Option<u64>,
    pub out: Option<PathBuf>,
    pub strict_floor: Option<bool>,
    pub witness_policy: Option<String>,
    pub input: Option<PathBuf>,
    pub target: Option<PathBuf>,
    pub family: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn witness_policy(&self) -> CliResult<Option<WitnessPolicy>> {
        self.witness_policy
            .as_deref()
            .map(|s| s.parse().map_err(|e: hornlab_core::Error| CliError::Usage(e.to_string())))
            .transpose()
    }
}

pub fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

pub fn parse_eps(s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| CliError::Usage(format!("--eps: {e}")))
}

/// Parses "n:r,n:r,...".
pub fn parse_family(s: &str) -> CliResult<Vec<(u32, u32)>> {
    let bad = || CliError::Usage(format!("--family expects n:r pairs, got {s:?}"));
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (n, r) = pair.split_once(':').ok_or_else(bad)?;
            Ok((n.trim().parse().map_err(|_| bad())?, r.trim().parse().map_err(|_| bad())?))
        })
        .collect::<CliResult<Vec<_>>>()
        .and_then(|v| if v.is_empty() { Err(bad()) } else { Ok(v) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_pairs() {
        assert_eq!(parse_family("8:4, 12:6").unwrap(), vec![(8, 4), (12, 6)]);
        assert!(parse_family("8-4").is_err());
        assert!(parse_family("").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<Config>(r#"{"n": 3, "colour": 1}"#).is_err());
        let c: Config = serde_json::from_str(r#"{"n": 3, "set": "T", "strict-floor": true}"#).unwrap();
        assert_eq!((c.n, c.set, c.strict_floor), (Some(3), Some(SetKind::T), Some(true)));
    }
}
