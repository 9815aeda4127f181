//! Approximating a triple in the asymptotic Horn system by an embedded element of `T^n_r`.
//!
//! Pipeline: average to `r` atoms, add `ε·S`, floor to the `1/n` grid,
//! repair the trace, then read off `(I, J, K)`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::horncomb::{self, HornTriple};
use crate::quantile::{QuantileTriple, StepQuantile};
use crate::rational::{self, int, one, ratio, zero, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct ApproxReport {
    pub input: QuantileTriple,
    #[serde(with = "rational")]
    pub epsilon: Rational,
    pub n: u32,
    pub r: u32,
    pub strict_floor: bool,
    pub output: HornTriple,
    /// `‖Q_i − 𝐐_{I,J,K,n,i}‖₁`.
    #[serde(with = "rational::vec")]
    pub distances: Vec<Rational>,
    /// `‖Q_i − Q^r_i‖₁`.
    #[serde(with = "rational::vec")]
    pub averaging_distances: Vec<Rational>,
    /// `sup |Q^r_i − 𝐐_{I,J,K,n,i}|`.
    #[serde(with = "rational::vec")]
    pub sup_deviations: Vec<Rational>,
    /// `1/r + 3rε`.
    #[serde(with = "rational")]
    pub distance_bound: Rational,
    /// Whether `n ≥ 6/(εr)`.
    pub lemma_regime: bool,
    pub in_t_verified: bool,
}

/// `max(1/r², 6/(nr))`.
pub fn default_epsilon(n: u32, r: u32) -> Result<Rational> {
    if n == 0 || r == 0 {
        return Err(Error::OutOfRange("n and r must be positive".into()));
    }
    let a = ratio(1, (r as i64) * (r as i64));
    let b = ratio(6, n as i64 * r as i64);
    Ok(a.max(b))
}

/// `Q + ε·S` for an `r`-atomic `Q`.
pub fn perturb(q: &QuantileTriple, r: u32, eps: &Rational) -> Result<QuantileTriple> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange("ε must be positive".into()));
    }
    if !q.is_n_atomic(r as u64) {
        return Err(Error::Precondition(format!("triple is not {r}-atomic")));
    }
    let s = horncomb::s_triple(r)?;
    let unit = one();
    Ok(QuantileTriple::new(
        StepQuantile::linear_combination(&unit, &q.q1, eps, &s.q1)?,
        StepQuantile::linear_combination(&unit, &q.q2, eps, &s.q2)?,
        StepQuantile::linear_combination(&unit, &q.q3, eps, &s.q3)?,
    ))
}

/// Pointwise floor to the `1/n` grid.
///
/// The default keeps grid points fixed; `strict` takes the largest multiple
/// of `1/n` strictly below each value.
pub fn floor_to_grid(q: &QuantileTriple, n: u32, strict: bool) -> Result<QuantileTriple> {
    if n == 0 {
        return Err(Error::OutOfRange("grid needs n ≥ 1".into()));
    }
    let nn = int(n as i64);
    q.try_map(|c| {
        c.map_values(|v| {
            if strict {
                ((v * &nn).ceil() - one()) / &nn
            } else {
                rational::floor_to(v, n as u64)
            }
        })
    })
}

/// Integer `τ` with `tr(P) = τ/(nr)`, checked to lie in `[-r, 2r]`.
pub fn trace_defect(p: &QuantileTriple, n: u32, r: u32) -> Result<i64> {
    let scaled = p.trace() * int(n as i64 * r as i64);
    if !scaled.is_integer() {
        return Err(Error::Precondition(format!(
            "trace {} is not a multiple of 1/(nr)",
            rational::format_rational(&p.trace())
        )));
    }
    let tau: i64 = scaled
        .to_integer()
        .try_into()
        .map_err(|_| Error::Precondition("trace defect overflows".into()))?;
    if tau < -(r as i64) || tau > 2 * r as i64 {
        return Err(Error::Precondition(format!("trace defect τ = {tau} outside [-{r}, {}]", 2 * r)));
    }
    Ok(tau)
}

/// Adds `1/n` on `[(r - a_i)/r, 1]` so that the trace vanishes.
///
/// `a = (min(τ, r), τ - min(τ, r), 0)` for `τ ≥ 0` and `(0, 0, -τ)` otherwise.
pub fn trace_correct(p: &QuantileTriple, n: u32, r: u32) -> Result<QuantileTriple> {
    if r == 0 || !p.is_n_atomic(r as u64) || !p.is_n_integral(n as u64) {
        return Err(Error::Precondition(format!("triple is not {n}-integral and {r}-atomic")));
    }
    let tau = trace_defect(p, n, r)?;
    let a = if tau >= 0 {
        let a1 = tau.min(r as i64);
        [a1, tau - a1, 0]
    } else {
        [0, 0, -tau]
    };
    let delta = ratio(1, n as i64);
    let bump = |c: &StepQuantile, ai: i64| -> Result<StepQuantile> {
        if ai == 0 {
            return Ok(c.clone());
        }
        c.bump_tail(&ratio(r as i64 - ai, r as i64), &delta)
    };
    let out = QuantileTriple::new(bump(&p.q1, a[0])?, bump(&p.q2, a[1])?, bump(&p.q3, a[2])?);
    if !out.trace().is_zero() {
        return Err(Error::Invariant("trace correction left a nonzero trace".into()));
    }
    Ok(out)
}

fn sup_distance(a: &StepQuantile, b: &StepQuantile) -> Result<Rational> {
    let mut best = zero();
    for t in a.breaks().iter().chain(b.breaks()) {
        let d = (a.eval(t)? - b.eval(t)?).abs();
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Runs the full pipeline on a `[0, 1]`-valued triple.
///
/// The caller vouches that `q` lies in the asymptotic Horn system; the
/// report records whether the decoded triple was verified to lie in `T^n_r`.
pub fn approximate_in_tnr(
    q: &QuantileTriple,
    n: u32,
    r: u32,
    eps: &Rational,
    strict_floor: bool,
) -> Result<ApproxReport> {
    if r == 0 || r >= n {
        return Err(Error::OutOfRange(format!("need 1 ≤ r ≤ n-1, got n = {n}, r = {r}")));
    }
    if !q.values_within_unit() {
        return Err(Error::Precondition("input must take values in [0, 1]".into()));
    }
    let qr = q.average_n(r as u64)?;
    let perturbed = perturb(&qr, r, eps)?;
    let floored = floor_to_grid(&perturbed, n, strict_floor)?;
    let corrected = trace_correct(&floored, n, r)?;
    let output = HornTriple::decode(&corrected, n, r)?;
    let embedded = output.embed();
    if !embedded.same_functions(&corrected) {
        return Err(Error::Invariant("decode is not inverse to embed".into()));
    }
    let sup_deviations = qr
        .components()
        .iter()
        .zip(embedded.components())
        .map(|(a, b)| sup_distance(a, b))
        .collect::<Result<Vec<_>>>()?;
    let lemma_regime = int(n as i64) * eps * int(r as i64) >= int(6);
    Ok(ApproxReport {
        input: q.clone(),
        epsilon: eps.clone(),
        n,
        r,
        strict_floor,
        distances: q.l1_distances(&embedded).to_vec(),
        averaging_distances: q.l1_distances(&qr).to_vec(),
        sup_deviations,
        distance_bound: ratio(1, r as i64) + int(3 * r as i64) * eps,
        lemma_regime,
        in_t_verified: output.in_t()?,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::horn_margin;

    fn h(n: u32, i: &[u32], j: &[u32], k: &[u32]) -> HornTriple {
        HornTriple::new(n, i.len() as u32, i.to_vec(), j.to_vec(), k.to_vec()).unwrap()
    }

    #[test]
    fn default_epsilon_meets_regime() {
        for (n, r) in [(10, 3), (64, 4), (100, 9), (7, 6)] {
            let eps = default_epsilon(n, r).unwrap();
            assert!(int(n as i64) * &eps * int(r as i64) >= int(6));
        }
        assert_eq!(default_epsilon(64, 4).unwrap(), ratio(1, 16));
    }

    #[test]
    fn perturb_preserves_trace_and_shifts_margins() {
        let base = h(6, &[2, 4], &[1, 5], &[3, 6]);
        assert!(base.in_t().unwrap());
        let q = base.embed().average_n(3).unwrap();
        let eps = ratio(1, 10);
        let p = perturb(&q, 3, &eps).unwrap();
        assert_eq!(p.trace(), q.trace());
        for pp in 1..3u32 {
            for w in horncomb::enumerate_t(3, pp).unwrap().iter() {
                let before = horn_margin(&q, w).unwrap().value;
                let after = horn_margin(&p, w).unwrap().value;
                assert_eq!(after - before, &eps * ratio((3 - pp) as i64, 2));
            }
        }
        for d in p.l1_distances(&q).iter() {
            assert!(*d <= int(2 * 3) * &eps);
        }
        assert!(perturb(&q, 3, &zero()).is_err());
    }

    #[test]
    fn floor_examples() {
        let third = QuantileTriple::constant(ratio(1, 3), ratio(1, 3), ratio(1, 3));
        let f = floor_to_grid(&third, 2, false).unwrap();
        assert!(f.same_functions(&QuantileTriple::constant(zero(), zero(), zero())));
        let on_grid = QuantileTriple::constant(ratio(1, 4), ratio(1, 2), ratio(3, 4));
        assert!(floor_to_grid(&on_grid, 4, false).unwrap().same_functions(&on_grid));
        let strict = floor_to_grid(&on_grid, 4, true).unwrap();
        assert!(strict.same_functions(&QuantileTriple::constant(zero(), ratio(1, 4), ratio(1, 2))));
        let t = floor_to_grid(&third, 5, false).unwrap().trace();
        assert!(t >= ratio(-1, 5) && t <= ratio(2, 5));
        assert!(floor_to_grid(&third, 0, false).is_err());
    }

    #[test]
    fn trace_correction_rule() {
        let flat = QuantileTriple::constant(zero(), zero(), zero());
        assert!(trace_correct(&flat, 8, 2).unwrap().same_functions(&flat));
        // τ = r: all of component 1 moves up by 1/n.
        let p = QuantileTriple::new(
            StepQuantile::from_atoms(vec![zero(), zero()]).unwrap(),
            StepQuantile::from_atoms(vec![zero(), zero()]).unwrap(),
            StepQuantile::from_atoms(vec![zero(), ratio(1, 4)]).unwrap(),
        );
        assert_eq!(trace_defect(&p, 4, 2).unwrap(), 1);
        let c = trace_correct(&p, 4, 2).unwrap();
        assert_eq!(c.trace(), zero());
        assert!(c.q1.same_function(&StepQuantile::from_atoms(vec![zero(), ratio(1, 4)]).unwrap()));
        let p = QuantileTriple::constant(ratio(1, 4), zero(), zero());
        let c = trace_correct(&p, 4, 2).unwrap();
        assert!(c.q3.same_function(&StepQuantile::constant(ratio(1, 4))));
        let p = QuantileTriple::constant(zero(), zero(), one());
        assert!(trace_correct(&p, 4, 2).is_err());
    }

    #[test]
    fn pipeline_on_embedded_member() {
        let base = h(6, &[2, 4], &[1, 5], &[3, 6]);
        let q = base.embed().dilate_translate(&ratio(1, 2), &zero(), &zero());
        let rep = approximate_in_tnr(&q, 48, 2, &ratio(1, 16), false).unwrap();
        assert!(rep.lemma_regime);
        assert!(rep.in_t_verified);
        assert_eq!(rep.output.embed().trace(), zero());
        for d in &rep.distances {
            assert!(*d <= rep.distance_bound);
        }
        for ((d, a), s) in rep.distances.iter().zip(&rep.averaging_distances).zip(&rep.sup_deviations) {
            assert!(*d <= a + s);
        }
    }

    #[test]
    fn pipeline_dirac_constant() {
        let q = QuantileTriple::constant(ratio(1, 4), ratio(1, 4), ratio(1, 2));
        let rep = approximate_in_tnr(&q, 64, 4, &ratio(1, 64), false).unwrap();
        assert!(rep.in_t_verified, "{}", rep.output);
        for d in &rep.distances {
            assert!(*d <= ratio(7, 16));
        }
    }

    #[test]
    fn pipeline_reports_shift_regime() {
        let q = QuantileTriple::constant(zero(), zero(), zero()).dilate_translate(&one(), &ratio(1, 2), &ratio(1, 2));
        let err = approximate_in_tnr(&q, 8, 4, &ratio(1, 8), false).unwrap_err();
        assert!(matches!(err, Error::ShiftRegime(_)));
    }

    #[test]
    fn report_json_uses_fraction_strings() {
        let q = QuantileTriple::constant(ratio(1, 4), ratio(1, 4), ratio(1, 2));
        let rep = approximate_in_tnr(&q, 16, 2, &ratio(1, 16), false).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["epsilon"], "1/16");
        assert!(v["distances"][0].is_string());
        assert!(v["output"]["I"].is_array());
    }
}
