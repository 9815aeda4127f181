//! Desk-scale redundancy search: approximate a target inequality at larger
//! levels and look for an approximant that still rejects a violating triple.

use hornlab_core::approx::approximate_in_tnr;
use hornlab_core::rational::{format_rational, ratio, Rational};
use hornlab_core::{horn_margin, Error, HornTriple, QuantileTriple, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RedundancyReport {
    pub target: HornTriple,
    pub target_margin: String,
    pub found: bool,
    pub witness: Option<HornTriple>,
    pub witness_margin: Option<String>,
    /// Per-component L1 distance between the embedded target and the embedded witness.
    pub distances: Option<Vec<String>>,
    pub attempts: Vec<Attempt>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub n: u32,
    pub r: u32,
    pub epsilon: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<HornTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Violated,
    Satisfied,
    Unverified,
    Refused,
}

/// `({1}, {1}, {1})` at `n = 2`: `γ₁ ≤ α₁ + β₁`.
pub fn default_target() -> HornTriple {
    HornTriple::new(2, 1, vec![1], vec![1], vec![1]).expect("valid triple")
}

pub fn search(
    target: &HornTriple,
    violating: &QuantileTriple,
    family: &[(u32, u32)],
    eps: Option<&Rational>,
    strict_floor: bool,
) -> Result<RedundancyReport> {
    let target_margin = horn_margin(violating, target)?;
    if !target_margin.is_violated() {
        return Err(Error::Precondition(format!(
            "the triple satisfies the target inequality (margin {})",
            format_rational(&target_margin.value)
        )));
    }
    let source = target.embed();
    let mut attempts = Vec::with_capacity(family.len());
    for &(n, r) in family {
        let eps = match eps {
            Some(e) => e.clone(),
            None if r > 0 => ratio(1, (r as i64) * (r as i64)),
            None => return Err(Error::OutOfRange("family levels need r ≥ 1".into())),
        };
        let mut attempt = Attempt {
            n,
            r,
            epsilon: format_rational(&eps),
            outcome: Outcome::Refused,
            witness: None,
            margin: None,
            message: None,
        };
        match approximate_in_tnr(&source, n, r, &eps, strict_floor) {
            Ok(report) if !report.in_t_verified => {
                attempt.outcome = Outcome::Unverified;
                attempt.witness = Some(report.output);
            }
            Ok(report) => {
                let m = horn_margin(violating, &report.output)?;
                attempt.outcome = if m.is_violated() {
                    Outcome::Violated
                } else {
                    Outcome::Satisfied
                };
                attempt.margin = Some(format_rational(&m.value));
                attempt.witness = Some(report.output);
            }
            Err(e @ (Error::Invariant(_) | Error::Numerical(_))) => return Err(e),
            Err(e) => attempt.message = Some(e.to_string()),
        }
        attempts.push(attempt);
    }

    let hit = attempts.iter().find(|a| a.outcome == Outcome::Violated);
    let witness = hit.and_then(|a| a.witness.clone());
    let distances = witness.as_ref().map(|w| {
        source
            .l1_distances(&w.embed())
            .iter()
            .map(format_rational)
            .collect()
    });
    Ok(RedundancyReport {
        target: target.clone(),
        target_margin: format_rational(&target_margin.value),
        found: witness.is_some(),
        witness_margin: hit.and_then(|a| a.margin.clone()),
        witness,
        distances,
        attempts,
    })
}
