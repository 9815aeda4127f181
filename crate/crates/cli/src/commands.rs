use std::io::Write;
use std::path::{Path, PathBuf};

use hornlab_core::approx::{approximate_in_tnr, default_epsilon};
use hornlab_core::oracle::{self, AsymptoticKind, SpectraSample, MAX_DEPTH};
use hornlab_core::rational::{format_rational, ratio};
use hornlab_core::screl::{Subset, UniqueWeakSc};
use hornlab_core::{enumerate_t, enumerate_u, is_member_h_desk, is_member_hn, FiniteRelation, QuantileTriple, ScMode};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::redundancy;

/// Default scan depth of `check`.
pub const DEFAULT_DEPTH: u32 = 5;

pub fn execute(cli: Cli, out: &mut Vec<u8>) -> CliResult<Option<PathBuf>> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let target = cli.out.clone().or_else(|| config.out.clone());
    match cli.command {
        Command::Enumerate(a) => enumerate(a, &config, out)?,
        Command::Check(a) => check(a, &config, out)?,
        Command::Approximate(a) => approximate(a, &config, out)?,
        Command::Oracle(c) => oracle_command(c, &config, out)?,
        Command::Redundancy(a) => redundancy(a, &config, out)?,
        Command::Sc(a) => sc(a, out)?,
    }
    Ok(target)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn json_line(out: &mut Vec<u8>, value: &impl Serialize) -> CliResult<()> {
    serde_json::to_writer(&mut *out, value).map_err(std::io::Error::from)?;
    out.push(b'\n');
    Ok(())
}

fn json_pretty(out: &mut Vec<u8>, value: &impl Serialize) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(std::io::Error::from)?;
    out.push(b'\n');
    Ok(())
}

fn enumerate(a: EnumerateArgs, c: &Config, out: &mut Vec<u8>) -> CliResult<()> {
    let n = required(a.n.or(c.n), "n")?;
    let r = required(a.r.or(c.r), "r")?;
    let set = required(a.set.or(c.set), "set")?;
    let triples = match set {
        SetKind::U => enumerate_u(n, r)?,
        SetKind::T => enumerate_t(n, r)?.to_vec(),
    };
    for h in &triples {
        json_line(out, h)?;
    }
    Ok(())
}

fn check(a: CheckArgs, c: &Config, out: &mut Vec<u8>) -> CliResult<()> {
    let input = required(a.input.or_else(|| c.input.clone()), "input")?;
    let q: QuantileTriple = read_json(&input)?;
    let policy = a.witness_policy.or(c.witness_policy()?).unwrap_or_default();
    let verdict = match a.n.or(c.n) {
        Some(n) => is_member_hn(&q, n, policy)?,
        None => is_member_h_desk(&q, a.depth.or(c.depth).unwrap_or(DEFAULT_DEPTH), policy)?,
    };
    json_line(out, &verdict)
}

fn approximate(a: ApproximateArgs, c: &Config, out: &mut Vec<u8>) -> CliResult<()> {
    let input = required(a.input.or_else(|| c.input.clone()), "input")?;
    let q: QuantileTriple = read_json(&input)?;
    let n = required(a.n.or(c.n), "n")?;
    let r = required(a.r.or(c.r), "r")?;
    let eps = match a.eps.or_else(|| c.eps.clone()) {
        Some(s) => parse_eps(&s)?,
        None => default_epsilon(n, r)?,
    };
    let strict = a.strict_floor || c.strict_floor.unwrap_or(false);
    json_pretty(out, &approximate_in_tnr(&q, n, r, &eps, strict)?)
}

fn redundancy(a: RedundancyArgs, c: &Config, out: &mut Vec<u8>) -> CliResult<()> {
    let input = required(a.input.or_else(|| c.input.clone()), "input")?;
    let violating: QuantileTriple = read_json(&input)?;
    let target = match a.target.or_else(|| c.target.clone()) {
        Some(path) => read_json(&path)?,
        None => redundancy::default_target(),
    };
    let family = parse_family(&required(a.family.or_else(|| c.family.clone()), "family")?)?;
    let eps = a.eps.or_else(|| c.eps.clone()).map(|s| parse_eps(&s)).transpose()?;
    let strict = a.strict_floor || c.strict_floor.unwrap_or(false);
    json_pretty(out, &redundancy::search(&target, &violating, &family, eps.as_ref(), strict)?)
}

struct Batch {
    n: usize,
    seeds: Vec<u64>,
    depth: Option<u32>,
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
}

impl Batch {
    fn from_args(a: OracleArgs, c: &Config) -> CliResult<Self> {
        let n = required(a.n.or(c.n), "n")? as usize;
        if n == 0 {
            return Err(CliError::Usage("--n must be positive".into()));
        }
        let seed = a.seed.or(c.seed).unwrap_or(0);
        let seeds = match a.seeds.or(c.seeds) {
            None => vec![seed],
            Some(count) => (0..count).map(|i| oracle::derive_seed(seed, i)).collect(),
        };
        Ok(Batch {
            n,
            seeds,
            depth: a.depth.or(c.depth),
            alpha: a.alpha,
            beta: a.beta,
        })
    }

    fn depth(&self) -> u32 {
        self.depth.unwrap_or((self.n as u32).clamp(2, MAX_DEPTH))
    }

    fn sample(&self, seed: u64) -> hornlab_core::Result<SpectraSample> {
        match (&self.alpha, &self.beta) {
            (Some(a), Some(b)) => oracle::sample_horn_point(a, b, seed),
            _ => oracle::random_sample(self.n, seed),
        }
    }

    /// Runs `f` on every seed in parallel, keeping seed order.
    fn map<T: Send>(&self, f: impl Fn(u64) -> hornlab_core::Result<T> + Sync) -> CliResult<Vec<T>> {
        Ok(self.seeds.par_iter().map(|&s| f(s)).collect::<hornlab_core::Result<Vec<_>>>()?)
    }
}

#[derive(Serialize)]
struct SoundnessRow {
    n: usize,
    seed: u64,
    depth: u32,
    min_margin: f64,
    violations: usize,
    trace: f64,
    witness: String,
}

#[derive(Serialize)]
struct SudokuRow {
    n: usize,
    seed: u64,
    depth: u32,
    min_margin: f64,
    violations: usize,
    passed: bool,
}

#[derive(Serialize)]
struct AsymptoticRow {
    n: usize,
    seed: u64,
    inequality: &'static str,
    parameters: String,
    margin: f64,
}

fn write_csv<T: Serialize>(out: &mut Vec<u8>, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(&mut *out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn asymptotic_kinds() -> Vec<(&'static str, String, AsymptoticKind)> {
    let quarters = [ratio(0, 1), ratio(1, 4), ratio(1, 2)];
    let mut kinds = Vec::new();
    for a in &quarters {
        for b in &quarters {
            kinds.push((
                "weyl",
                format!("a={} b={}", format_rational(a), format_rational(b)),
                AsymptoticKind::Weyl {
                    a: a.clone(),
                    b: b.clone(),
                },
            ));
        }
    }
    for k in 0..=4 {
        let x = ratio(k, 4);
        kinds.push(("ky-fan", format!("x={}", format_rational(&x)), AsymptoticKind::KyFan { x }));
    }
    kinds
}

fn oracle_command(cmd: OracleCommand, c: &Config, out: &mut Vec<u8>) -> CliResult<()> {
    match cmd {
        OracleCommand::Sample(a) => {
            let batch = Batch::from_args(a, c)?;
            if let (Some(a), Some(b)) = (&batch.alpha, &batch.beta) {
                if a.len() != batch.n || b.len() != batch.n {
                    return Err(CliError::Usage("--alpha and --beta need n entries".into()));
                }
            } else if batch.alpha.is_some() || batch.beta.is_some() {
                return Err(CliError::Usage("--alpha and --beta go together".into()));
            }
            for s in batch.map(|seed| batch.sample(seed))? {
                json_line(out, &s)?;
            }
            Ok(())
        }
        OracleCommand::Soundness(a) => {
            let batch = Batch::from_args(a, c)?;
            let depth = batch.depth();
            let rows = batch.map(|seed| {
                let rep = oracle::soundness_check(&batch.sample(seed)?, depth, oracle::DEFAULT_TOL)?;
                Ok(SoundnessRow {
                    n: rep.n,
                    seed: rep.seed,
                    depth: rep.depth,
                    min_margin: rep.min_margin,
                    violations: rep.violations,
                    trace: rep.trace,
                    witness: rep.witness.map(|h| h.to_string()).unwrap_or_default(),
                })
            })?;
            write_csv(out, &rows)
        }
        OracleCommand::Sudoku(a) => {
            let batch = Batch::from_args(a, c)?;
            let rows = batch.map(|seed| {
                let rep = oracle::sudoku_check(batch.n, seed)?;
                Ok(SudokuRow {
                    n: rep.n,
                    seed: rep.seed,
                    depth: rep.soundness.depth,
                    min_margin: rep.soundness.min_margin,
                    violations: rep.soundness.violations,
                    passed: rep.passed(),
                })
            })?;
            write_csv(out, &rows)
        }
        OracleCommand::Asymptotic(a) => {
            let batch = Batch::from_args(a, c)?;
            let kinds = asymptotic_kinds();
            let specs: Vec<AsymptoticKind> = kinds.iter().map(|(_, _, k)| k.clone()).collect();
            let margins = batch.map(|seed| {
                let s = batch.sample(seed)?;
                Ok((s.seed, oracle::asymptotic_inequality_check(&s, &specs)?))
            })?;
            let rows: Vec<AsymptoticRow> = margins
                .into_iter()
                .flat_map(|(seed, ms)| {
                    kinds.iter().zip(ms).map(move |((name, params, _), m)| AsymptoticRow {
                        n: batch.n,
                        seed,
                        inequality: name,
                        parameters: params.clone(),
                        margin: m,
                    })
                })
                .collect();
            write_csv(out, &rows)
        }
    }
}

#[derive(Serialize)]
struct SetList {
    mode: &'static str,
    sets: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct Extension {
    subset: Vec<String>,
    extension: Vec<String>,
}

#[derive(Serialize)]
struct Uniqueness {
    subset: Vec<String>,
    result: &'static str,
    sets: Vec<Vec<String>>,
}

fn sc(a: ScArgs, out: &mut Vec<u8>) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.relation).map_err(|e| CliError::input(&a.relation, e))?;
    let rel = FiniteRelation::from_json(&text)?;
    let subset = |names: &[String]| -> CliResult<Subset> {
        let names: Vec<&str> = names.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
        Ok(rel.subset_from_labels(&names)?)
    };
    let labels = |sets: &[Subset]| sets.iter().map(|&s| rel.subset_labels(s)).collect::<Vec<_>>();
    match a.action {
        ScAction::Check(s) => json_line(out, &rel.verdict(subset(&s.subset)?)?),
        ScAction::Enumerate { mode } => {
            let (mode, name) = match mode {
                ModeArg::Weak => (ScMode::Weak, "weak"),
                ModeArg::Strong => (ScMode::Strong, "strong"),
            };
            let sets = rel.enumerate_sc(mode)?;
            json_line(
                out,
                &SetList {
                    mode: name,
                    sets: labels(&sets),
                },
            )
        }
        ScAction::Extend(s) => {
            let e = subset(&s.subset)?;
            let ext = rel.extend_to_weak_sc(e)?;
            json_line(
                out,
                &Extension {
                    subset: rel.subset_labels(e),
                    extension: rel.subset_labels(ext),
                },
            )
        }
        ScAction::Unique(s) => {
            let e = subset(&s.subset)?;
            let (result, sets) = match rel.unique_weak_sc_containing(e)? {
                UniqueWeakSc::Unique(v) => ("unique", vec![v]),
                UniqueWeakSc::Multiple(vs) => ("multiple", vs),
                UniqueWeakSc::NoneFriendly => ("none-friendly", vec![]),
            };
            json_line(
                out,
                &Uniqueness {
                    subset: rel.subset_labels(e),
                    result,
                    sets: labels(&sets),
                },
            )
        }
    }
}

pub fn write_output(target: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match target {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
