//! The composition functional and the membership verdicts built on it.
//!
//! For triples `Q` and `Q̃` (the latter `[0, 1]`-valued) and a shift `μ ≥ 0`,
//!
//! ```text
//! E(Q, Q̃ + μt) = ∫₀¹ -Q1(Q̃1(t)+μt) - Q2(Q̃2(t)+μt) + Q3(Q̃3(t)+μt) dt
//! ```
//!
//! Every Horn inequality is `E(Q, 𝐐_{I,J,K,n} + (r/n)t) ≥ 0`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::horncomb::{self, HornTriple};
use crate::quantile::{QuantileTriple, StepQuantile};
use crate::rational::{self, one, zero, Rational};

/// Exact `∫₀¹ P(inner(t) + μt) dt`.
///
/// For `μ > 0` each inner piece `v` on `[a, b)` contributes
/// `(1/μ) ∫_{v+μa}^{v+μb} P`; for `μ = 0` it contributes `(b-a)·P(v)`.
pub fn compose_integral(p: &StepQuantile, inner: &StepQuantile, mu: &Rational) -> Result<Rational> {
    if mu.is_negative() {
        return Err(Error::OutOfRange("shift μ must be nonnegative".into()));
    }
    if inner.min_value().is_negative() {
        return Err(Error::OutOfRange("inner function must be nonnegative".into()));
    }
    let top = inner.max_value() + mu;
    if top > one() {
        return Err(Error::OutOfRange(format!(
            "inner(t) + μt reaches {} > 1",
            rational::format_rational(&top)
        )));
    }
    let mut acc = zero();
    if mu.is_zero() {
        for piece in inner.pieces() {
            acc += piece.width() * p.eval(&piece.value)?;
        }
    } else {
        for piece in inner.pieces() {
            let lo = &piece.value + mu * &piece.start;
            let hi = &piece.value + mu * &piece.end;
            acc += p.integral_between(&lo, &hi);
        }
        acc /= mu;
    }
    Ok(acc)
}

/// `E(Q, Q̃ + μt)`; requires `Q̃` valued in `[0, 1]` and `0 ≤ μ ≤ η(Q̃)`.
pub fn energy(q: &QuantileTriple, qt: &QuantileTriple, mu: &Rational) -> Result<Rational> {
    let eta = qt.eta()?;
    if mu.is_negative() || *mu > eta {
        return Err(Error::OutOfRange(format!(
            "μ = {} outside [0, η = {}]",
            rational::format_rational(mu),
            rational::format_rational(&eta)
        )));
    }
    Ok(compose_integral(&q.q3, &qt.q3, mu)?
        - compose_integral(&q.q1, &qt.q1, mu)?
        - compose_integral(&q.q2, &qt.q2, mu)?)
}

/// What a margin was measured against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Horn(HornTriple),
    Trace,
    Shift { mu: Rational },
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Witness::Horn(h) => h.serialize(s),
            Witness::Trace => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "trace")?;
                m.end()
            }
            Witness::Shift { mu } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "shift")?;
                m.serialize_entry("mu", &rational::format_rational(mu))?;
                m.end()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Margin {
    #[serde(with = "rational")]
    pub value: Rational,
    pub witness: Witness,
}

impl Margin {
    pub fn is_violated(&self) -> bool {
        self.value.is_negative()
    }
}

/// `E(Q, 𝐐_{I,J,K,n} + (r/n)t)` for the inequality indexed by `h`.
pub fn horn_margin(q: &QuantileTriple, h: &HornTriple) -> Result<Margin> {
    let value = energy(q, &h.embed(), &h.shift())?;
    Ok(Margin {
        value,
        witness: Witness::Horn(h.clone()),
    })
}

/// `E(𝐐_{h'}, 𝐐_{w} + (p/r)t)` from index sums alone:
/// `(1/pn)(-Σ_F i_f - Σ_G j_g + Σ_H k_h + p(p+1)/2)`.
pub fn embedded_margin_integer(h: &HornTriple, w: &HornTriple) -> Rational {
    let pick = |set: &[u32], idx: &[u32]| -> i64 {
        idx.iter().map(|&f| set[(f - 1) as usize] as i64).sum()
    };
    let p = w.r() as i64;
    let numer = -pick(h.i(), w.i()) - pick(h.j(), w.j()) + pick(h.k(), w.k()) + p * (p + 1) / 2;
    rational::ratio(numer, p * h.n() as i64)
}

/// How a violated inequality is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WitnessPolicy {
    /// First violation in (n, r, lexicographic) order.
    #[default]
    First,
    /// Most negative margin; ties go to the earliest.
    Max,
}

impl std::str::FromStr for WitnessPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(WitnessPolicy::First),
            "max" => Ok(WitnessPolicy::Max),
            other => Err(Error::Parse(format!("unknown witness policy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Member,
    Nonmember,
    InconclusiveAtDepth,
}

/// Outcome of a membership check.
///
/// For a nonmember `margin` is the reported violation; otherwise it is the
/// tightest margin seen, if any inequality was evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub margin: Option<Margin>,
    pub depth: u32,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }

    pub fn violated(&self) -> Option<&Margin> {
        match self.verdict {
            Verdict::Nonmember => self.margin.as_ref(),
            _ => None,
        }
    }
}

impl Serialize for MembershipVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("verdict", &self.verdict)?;
        match &self.margin {
            Some(margin) => {
                m.serialize_entry("margin", &rational::format_rational(&margin.value))?;
                m.serialize_entry("witness", &margin.witness)?;
            }
            None => {
                m.serialize_entry("margin", &None::<String>)?;
                m.serialize_entry("witness", &None::<Witness>)?;
            }
        }
        m.serialize_entry("depth", &self.depth)?;
        m.end()
    }
}

#[derive(Default)]
struct Scan {
    tightest: Option<Margin>,
    violation: Option<Margin>,
}

impl Scan {
    fn absorb(&mut self, margins: Vec<Margin>, policy: WitnessPolicy) {
        for m in margins {
            if self.tightest.as_ref().is_none_or(|t| m.value < t.value) {
                self.tightest = Some(m.clone());
            }
            if m.is_violated() {
                let replace = match (&self.violation, policy) {
                    (None, _) => true,
                    (Some(_), WitnessPolicy::First) => false,
                    (Some(v), WitnessPolicy::Max) => m.value < v.value,
                };
                if replace {
                    self.violation = Some(m);
                }
            }
        }
    }

    fn stop(&self, policy: WitnessPolicy) -> bool {
        policy == WitnessPolicy::First && self.violation.is_some()
    }
}

fn margins_against(q: &QuantileTriple, witnesses: &[HornTriple]) -> Result<Vec<Margin>> {
    witnesses.par_iter().map(|h| horn_margin(q, h)).collect()
}

fn trace_verdict(q: &QuantileTriple, depth: u32) -> Option<MembershipVerdict> {
    let tr = q.trace();
    if tr.is_zero() {
        return None;
    }
    Some(MembershipVerdict {
        verdict: Verdict::Nonmember,
        margin: Some(Margin {
            value: -tr.abs(),
            witness: Witness::Trace,
        }),
        depth,
    })
}

/// Spectra of `n×n` Hermitian `A + B = C` iff trace zero and every `T^n_r` margin is nonnegative.
pub fn is_member_hn(q: &QuantileTriple, n: u32, policy: WitnessPolicy) -> Result<MembershipVerdict> {
    if n == 0 || !q.is_n_atomic(n as u64) {
        return Err(Error::Precondition(format!("triple is not {n}-atomic")));
    }
    if let Some(v) = trace_verdict(q, n) {
        return Ok(v);
    }
    let mut scan = Scan::default();
    for r in 1..n {
        let level = horncomb::enumerate_t(n, r)?;
        scan.absorb(margins_against(q, &level)?, policy);
        if scan.stop(policy) {
            break;
        }
    }
    Ok(finish(scan, n, Verdict::Member))
}

fn finish(scan: Scan, depth: u32, otherwise: Verdict) -> MembershipVerdict {
    match scan.violation {
        Some(v) => MembershipVerdict {
            verdict: Verdict::Nonmember,
            margin: Some(v),
            depth,
        },
        None => MembershipVerdict {
            verdict: otherwise,
            margin: scan.tightest,
            depth,
        },
    }
}

/// Checks the trace and all `T^m_r` inequalities with `m ≤ depth`.
///
/// A violation certifies non-membership. Without one the verdict is
/// inconclusive, unless `Q` is `n`-atomic with `n ≤ depth`, in which case the
/// check at level `n` already decides membership.
pub fn is_member_h_desk(q: &QuantileTriple, depth: u32, policy: WitnessPolicy) -> Result<MembershipVerdict> {
    if depth < 2 {
        return Err(Error::OutOfRange("depth must be at least 2".into()));
    }
    if let Some(v) = trace_verdict(q, depth) {
        return Ok(v);
    }
    let mut scan = Scan::default();
    'levels: for m in 2..=depth {
        for r in 1..m {
            let level = horncomb::enumerate_t(m, r)?;
            scan.absorb(margins_against(q, &level)?, policy);
            if scan.stop(policy) {
                break 'levels;
            }
        }
    }
    let atomic = q.atomicity() <= depth as u64;
    let otherwise = if atomic {
        Verdict::Member
    } else {
        Verdict::InconclusiveAtDepth
    };
    Ok(finish(scan, depth, otherwise))
}

/// `E(Q, Q̃ + μt)` at every `μ` of the grid.
pub fn shifted_energy_scan(q: &QuantileTriple, qt: &QuantileTriple, grid: &[Rational]) -> Result<Vec<Margin>> {
    let eta = qt.eta()?;
    grid.iter()
        .map(|mu| {
            if mu.is_negative() || *mu > eta {
                return Err(Error::OutOfRange(format!(
                    "grid point {} outside [0, {}]",
                    rational::format_rational(mu),
                    rational::format_rational(&eta)
                )));
            }
            Ok(Margin {
                value: energy(q, qt, mu)?,
                witness: Witness::Shift { mu: mu.clone() },
            })
        })
        .collect()
}

type FunctionalCache = RwLock<HashMap<(u32, u32), Arc<Vec<HornTriple>>>>;

fn functional_cache() -> &'static FunctionalCache {
    static CACHE: OnceLock<FunctionalCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `T^n_r` rebuilt entirely through the functional criterion.
fn enumerate_t_functional(n: u32, r: u32) -> Result<Arc<Vec<HornTriple>>> {
    if let Some(hit) = functional_cache().read().expect("cache lock").get(&(n, r)) {
        return Ok(hit.clone());
    }
    for p in 1..r {
        enumerate_t_functional(r, p)?;
    }
    let set: Vec<HornTriple> = horncomb::enumerate_u(n, r)?
        .into_par_iter()
        .map(|h| in_t_functional(&h).map(|ok| ok.then_some(h)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let set = Arc::new(set);
    functional_cache()
        .write()
        .expect("cache lock")
        .entry((n, r))
        .or_insert_with(|| set.clone());
    Ok(set)
}

/// `T^n_r` membership by `tr(𝐐_h) = 0` and `E(𝐐_h, 𝐐_w + (p/r)t) ≥ 0` for all `w ∈ T^r_p`.
pub fn in_t_functional(h: &HornTriple) -> Result<bool> {
    let q = h.embed();
    if !q.trace().is_zero() {
        return Ok(false);
    }
    for p in 1..h.r() {
        let shift = rational::ratio(p as i64, h.r() as i64);
        for w in enumerate_t_functional(h.r(), p)?.iter() {
            if energy(&q, &w.embed(), &shift)?.is_negative() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn identity_staircase(k: i64) -> StepQuantile {
        StepQuantile::from_atoms((0..k).map(|j| ratio(j, k)).collect()).unwrap()
    }

    fn zero_triple() -> QuantileTriple {
        QuantileTriple::constant(zero(), zero(), zero())
    }

    fn h(n: u32, i: &[u32], j: &[u32], k: &[u32]) -> HornTriple {
        HornTriple::new(n, i.len() as u32, i.to_vec(), j.to_vec(), k.to_vec()).unwrap()
    }

    /// Quantiles of eigenvalue lists given in any order, scaled by `s`.
    fn spectra(a: &[i64], b: &[i64], c: &[i64], s: Rational) -> QuantileTriple {
        let comp = |xs: &[i64]| {
            let mut v: Vec<Rational> = xs.iter().map(|&x| int(x) * &s).collect();
            v.sort();
            StepQuantile::from_atoms(v).unwrap()
        };
        QuantileTriple::new(comp(a), comp(b), comp(c))
    }

    #[test]
    fn compose_examples() {
        let p = identity_staircase(8);
        let c = StepQuantile::constant(zero());
        assert_eq!(compose_integral(&p, &c, &one()).unwrap(), p.integral());
        let k = StepQuantile::constant(ratio(3, 7));
        let inner = StepQuantile::from_atoms(vec![zero(), ratio(1, 4)]).unwrap();
        assert_eq!(compose_integral(&k, &inner, &ratio(1, 2)).unwrap(), ratio(3, 7));
        assert_eq!(compose_integral(&k, &inner, &zero()).unwrap(), ratio(3, 7));
        assert!(compose_integral(&k, &inner, &ratio(4, 5)).is_err());
        let neg = StepQuantile::constant(ratio(-1, 4));
        assert!(compose_integral(&k, &neg, &zero()).is_err());
    }

    #[test]
    fn compose_against_embedded_subset_averages_blocks() {
        // (n/r) Σ_{i∈I} ∫_{(i-1)/n}^{i/n} P
        let p = StepQuantile::new(
            vec![zero(), ratio(1, 5), ratio(2, 3)],
            vec![ratio(-2, 1), ratio(1, 3), ratio(5, 2)],
        )
        .unwrap();
        for t in horncomb::enumerate_u(6, 3).unwrap().iter().take(40) {
            let q = t.embed();
            let n = t.n() as i64;
            let direct: Rational = t
                .i()
                .iter()
                .map(|&i| p.integral_between(&ratio(i as i64 - 1, n), &ratio(i as i64, n)))
                .sum::<Rational>()
                * ratio(n, t.r() as i64);
            assert_eq!(compose_integral(&p, &q.q1, &t.shift()).unwrap(), direct);
        }
    }

    #[test]
    fn energy_against_identity_shift_is_trace() {
        let q = QuantileTriple::new(
            identity_staircase(3),
            StepQuantile::constant(ratio(1, 5)),
            identity_staircase(4),
        );
        assert_eq!(energy(&q, &zero_triple(), &one()).unwrap(), q.trace());
    }

    #[test]
    fn energy_rejects_large_shift() {
        let qt = QuantileTriple::constant(ratio(1, 2), zero(), ratio(1, 2));
        assert!(energy(&zero_triple(), &qt, &ratio(3, 4)).is_err());
        assert!(energy(&zero_triple(), &qt, &ratio(1, 2)).is_ok());
    }

    #[test]
    fn membership_two_by_two_examples() {
        // α = β = (1, 0), γ = (3/2, 1/2) scaled by 1/2.
        let q = spectra(&[2, 0], &[2, 0], &[3, 1], ratio(1, 4));
        assert_eq!(q.trace(), zero());
        let v = is_member_hn(&q, 2, WitnessPolicy::First).unwrap();
        assert!(v.is_member());
        // γ = (5/2, -1/2)
        let q = spectra(&[2, 0], &[2, 0], &[5, -1], ratio(1, 4));
        assert_eq!(q.trace(), zero());
        let v = is_member_hn(&q, 2, WitnessPolicy::First).unwrap();
        assert_eq!(v.verdict, Verdict::Nonmember);
        let m = v.violated().unwrap();
        assert!(m.is_violated());
        assert_eq!(m.witness, Witness::Horn(h(2, &[1], &[1], &[1])));
    }

    #[test]
    fn membership_rejects_nonzero_trace() {
        let q = QuantileTriple::constant(zero(), zero(), one());
        let v = is_member_hn(&q, 1, WitnessPolicy::First).unwrap();
        assert_eq!(v.verdict, Verdict::Nonmember);
        assert_eq!(v.violated().unwrap().witness, Witness::Trace);
        let v = is_member_h_desk(&q, 3, WitnessPolicy::First).unwrap();
        assert_eq!(v.verdict, Verdict::Nonmember);
    }

    #[test]
    fn membership_requires_atomicity() {
        let q = QuantileTriple::new(identity_staircase(3), identity_staircase(3), identity_staircase(3));
        assert!(is_member_hn(&q, 2, WitnessPolicy::First).is_err());
        assert!(is_member_h_desk(&q, 1, WitnessPolicy::First).is_err());
    }

    #[test]
    fn dirac_triples_never_violate() {
        for (a, b) in [(ratio(1, 3), ratio(1, 2)), (zero(), zero()), (ratio(1, 7), ratio(6, 7))] {
            let q = QuantileTriple::dirac(a, b);
            let v = is_member_h_desk(&q, 5, WitnessPolicy::First).unwrap();
            assert_eq!(v.verdict, Verdict::Member);
        }
    }

    #[test]
    fn desk_check_is_inconclusive_for_fine_triples() {
        let fine = StepQuantile::from_atoms(vec![zero(), ratio(1, 7), ratio(2, 7), ratio(3, 7), ratio(4, 7), ratio(5, 7), ratio(6, 7)]).unwrap();
        let sum = fine.add(&fine).unwrap();
        let q = QuantileTriple::new(fine.clone(), fine, sum);
        let v = is_member_h_desk(&q, 4, WitnessPolicy::First).unwrap();
        assert_eq!(v.verdict, Verdict::InconclusiveAtDepth);
        let v = is_member_h_desk(&q, 7, WitnessPolicy::First).unwrap();
        assert_eq!(v.verdict, Verdict::Member);
    }

    #[test]
    fn witness_policies_agree_on_existence() {
        let q = spectra(&[3, 0, -1], &[2, 2, 0], &[9, -1, -2], ratio(1, 16));
        assert_eq!(q.trace(), zero());
        let first = is_member_hn(&q, 3, WitnessPolicy::First).unwrap();
        let max = is_member_hn(&q, 3, WitnessPolicy::Max).unwrap();
        assert_eq!(first.verdict, Verdict::Nonmember);
        assert_eq!(max.verdict, Verdict::Nonmember);
        assert!(max.violated().unwrap().value <= first.violated().unwrap().value);
    }

    #[test]
    fn s_triple_margins() {
        // Block integrals of S over [(f-1)/r, f/r) are f/r, so the margin is
        // (1/p)(-ΣF f - ΣG g + ΣH (h + (r+1)/2)) = (r-p)/2.
        for r in 2..=5u32 {
            let s = horncomb::s_triple(r).unwrap();
            for p in 1..r {
                for w in horncomb::enumerate_t(r, p).unwrap().iter() {
                    let sum = |xs: &[u32]| xs.iter().map(|&x| x as i64).sum::<i64>();
                    let blocks = ratio(-sum(w.i()) - sum(w.j()) + sum(w.k()), p as i64)
                        + ratio(r as i64 + 1, 2);
                    let m = horn_margin(&s, w).unwrap().value;
                    assert_eq!(m, blocks);
                    assert_eq!(m, ratio((r - p) as i64, 2));
                }
            }
        }
    }

    #[test]
    fn integer_and_functional_margins_agree() {
        for n in 2..=5u32 {
            for r in 2..n {
                for hp in horncomb::enumerate_u(n, r).unwrap() {
                    let q = hp.embed();
                    for p in 1..r {
                        for w in horncomb::enumerate_t(r, p).unwrap().iter() {
                            let exact = energy(&q, &w.embed(), &w.shift()).unwrap();
                            assert_eq!(exact, embedded_margin_integer(&hp, w));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sign_flip_matches_classical_form() {
        // r·E(Q, 𝐐_h + (r/n)t) = Σ_I α̂ + Σ_J β̂ - Σ_K γ̂, α̂_i = -α_{n+1-i}.
        let alpha = [5i64, 2, 1, -3];
        let beta = [4i64, 4, 0, -1];
        let gamma = [8i64, 3, 1, -4];
        let q = spectra(&alpha, &beta, &gamma, ratio(1, 1));
        let hat = |v: &[i64], i: u32| -v[v.len() - i as usize];
        for r in 1..4 {
            for t in horncomb::enumerate_t(4, r).unwrap().iter() {
                let m = horn_margin(&q, t).unwrap().value * int(t.r() as i64);
                let classical: i64 = t.i().iter().map(|&i| hat(&alpha, i)).sum::<i64>()
                    + t.j().iter().map(|&j| hat(&beta, j)).sum::<i64>()
                    - t.k().iter().map(|&k| hat(&gamma, k)).sum::<i64>();
                assert_eq!(m, int(classical), "{t}");
            }
        }
    }

    #[test]
    fn weyl_scan_at_zero_shift() {
        let q = QuantileTriple::new(identity_staircase(4), identity_staircase(2), identity_staircase(8));
        let (a, b) = (ratio(1, 4), ratio(1, 2));
        let qt = QuantileTriple::dirac(a.clone(), b.clone());
        let m = shifted_energy_scan(&q, &qt, &[zero()]).unwrap();
        let expect = -q.q1.eval(&a).unwrap() - q.q2.eval(&b).unwrap() + q.q3.eval(&(a + b)).unwrap();
        assert_eq!(m[0].value, expect);
        assert!(shifted_energy_scan(&q, &qt, &[ratio(1, 2)]).is_err());
    }

    #[test]
    fn ky_fan_scan_matches_tail_integral() {
        // x·E(Q, 0 + x t) = tr(Q) + ∫_x^1 (Q1 + Q2 - Q3)
        let q = QuantileTriple::new(identity_staircase(3), identity_staircase(5), identity_staircase(4));
        let grid: Vec<Rational> = (1..=6).map(|k| ratio(k, 6)).collect();
        let scan = shifted_energy_scan(&q, &zero_triple(), &grid).unwrap();
        for (x, m) in grid.iter().zip(scan) {
            let tail = q.q1.integral_between(x, &one()) + q.q2.integral_between(x, &one())
                - q.q3.integral_between(x, &one());
            assert_eq!(m.value * x, q.trace() + tail);
        }
    }

    #[test]
    fn verdict_json_shape() {
        let q = QuantileTriple::constant(zero(), zero(), one());
        let v = is_member_hn(&q, 1, WitnessPolicy::First).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"verdict":"nonmember","margin":"-1","witness":{"kind":"trace"},"depth":1}"#);
    }
}
