//! Exact step quantile functions and triples of them.
//!
//! A [`StepQuantile`] is the quantile function of a finitely-atomic probability
//! measure with rational atoms and weights: right-continuous, nondecreasing and
//! piecewise constant on `[0, 1)`, with `Q(1)` taken as the left limit.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, one, zero, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepQuantile {
    breaks: Vec<Rational>,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    #[serde(with = "rational::vec")]
    breaks: Vec<Rational>,
    #[serde(with = "rational::vec")]
    values: Vec<Rational>,
}

impl TryFrom<RawStep> for StepQuantile {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        StepQuantile::new(raw.breaks, raw.values)
    }
}

impl From<StepQuantile> for RawStep {
    fn from(q: StepQuantile) -> Self {
        RawStep {
            breaks: q.breaks,
            values: q.values,
        }
    }
}

/// One constant piece `[start, end)` of a step function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub start: Rational,
    pub end: Rational,
    pub value: Rational,
}

impl Piece {
    pub fn width(&self) -> Rational {
        &self.end - &self.start
    }
}

impl StepQuantile {
    /// Validates break points and piece values.
    ///
    /// `breaks` must start at 0, increase strictly and stay below 1; `values`
    /// must be nondecreasing and have one entry per piece.
    pub fn new(breaks: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != values.len() {
            return Err(Error::NotQuantile(format!(
                "{} breaks for {} values",
                breaks.len(),
                values.len()
            )));
        }
        if !breaks[0].is_zero() {
            return Err(Error::NotQuantile("first break must be 0".into()));
        }
        if breaks.last().is_some_and(|b| *b >= one()) {
            return Err(Error::NotQuantile("breaks must lie below 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotQuantile("breaks must increase strictly".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotQuantile("values must be nondecreasing".into()));
        }
        Ok(StepQuantile { breaks, values })
    }

    pub fn constant(c: Rational) -> Self {
        StepQuantile {
            breaks: vec![zero()],
            values: vec![c],
        }
    }

    /// The `n`-atomic function taking `values[j]` on `[j/n, (j+1)/n)`.
    pub fn from_atoms(values: Vec<Rational>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::NotQuantile("no atoms".into()));
        }
        let breaks = (0..n).map(|j| rational::ratio(j as i64, n as i64)).collect();
        Ok(StepQuantile::new(breaks, values)?.simplified())
    }

    /// Quantile function of `sum_k w_k δ_{x_k}`; weights must be positive and sum to one.
    pub fn from_weighted_atoms(mut atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::NotQuantile("no atoms".into()));
        }
        if atoms.iter().any(|(_, w)| !w.is_positive()) {
            return Err(Error::NotQuantile("atom weights must be positive".into()));
        }
        let total: Rational = atoms.iter().map(|(_, w)| w).sum();
        if !total.is_one() {
            return Err(Error::NotQuantile(format!(
                "atom weights sum to {}",
                rational::format_rational(&total)
            )));
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut breaks = Vec::with_capacity(atoms.len());
        let mut values = Vec::with_capacity(atoms.len());
        let mut acc = zero();
        for (x, w) in atoms {
            breaks.push(acc.clone());
            values.push(x);
            acc += w;
        }
        Ok(StepQuantile { breaks, values }.simplified())
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        (0..self.values.len()).map(move |s| Piece {
            start: self.breaks[s].clone(),
            end: self.breaks.get(s + 1).cloned().unwrap_or_else(one),
            value: self.values[s].clone(),
        })
    }

    pub fn min_value(&self) -> &Rational {
        &self.values[0]
    }

    pub fn max_value(&self) -> &Rational {
        self.values.last().expect("nonempty")
    }

    /// Piece value at `t`; `Q(1)` is the value of the last piece.
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        if t.is_negative() || *t > one() {
            return Err(Error::OutOfRange(format!(
                "t = {} outside [0, 1]",
                rational::format_rational(t)
            )));
        }
        Ok(self.values[self.piece_index(t)].clone())
    }

    fn piece_index(&self, t: &Rational) -> usize {
        let idx = self.breaks.partition_point(|b| b <= t);
        idx.saturating_sub(1)
    }

    pub fn integral(&self) -> Rational {
        self.pieces().map(|p| p.width() * p.value).sum()
    }

    /// Exact `∫_x^y Q` for `0 ≤ x ≤ y ≤ 1`.
    pub fn integral_between(&self, x: &Rational, y: &Rational) -> Rational {
        debug_assert!(x <= y);
        let mut acc = zero();
        for p in self.pieces() {
            if p.end <= *x {
                continue;
            }
            if p.start >= *y {
                break;
            }
            let lo = if p.start > *x { &p.start } else { x };
            let hi = if p.end < *y { &p.end } else { y };
            acc += (hi - lo) * &p.value;
        }
        acc
    }

    /// Merges adjacent pieces with equal values.
    pub fn simplified(&self) -> Self {
        let mut breaks = vec![self.breaks[0].clone()];
        let mut values = vec![self.values[0].clone()];
        for s in 1..self.values.len() {
            if self.values[s] != *values.last().unwrap() {
                breaks.push(self.breaks[s].clone());
                values.push(self.values[s].clone());
            }
        }
        StepQuantile { breaks, values }
    }

    /// Equality as functions on `[0, 1]`.
    pub fn same_function(&self, other: &Self) -> bool {
        self.simplified() == other.simplified()
    }

    /// Whether the function is constant on every `[(j-1)/n, j/n)`.
    pub fn is_n_atomic(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        let n = int(n as i64);
        self.simplified()
            .breaks
            .iter()
            .all(|b| (b * &n).is_integer())
    }

    /// Smallest `n` for which the function is `n`-atomic.
    pub fn atomicity(&self) -> u64 {
        let simple = self.simplified();
        let mut l = num_bigint::BigInt::one();
        for b in &simple.breaks {
            l = l.lcm(b.denom());
        }
        u64::try_from(l).unwrap_or(u64::MAX)
    }

    /// Whether every value is a multiple of `1/n`.
    pub fn is_n_integral(&self, n: u64) -> bool {
        let n = int(n as i64);
        self.values.iter().all(|v| (v * &n).is_integer())
    }

    fn merged_breaks(&self, other: &Self) -> Vec<Rational> {
        let mut grid: Vec<Rational> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .cloned()
            .collect();
        grid.sort();
        grid.dedup();
        grid
    }

    /// Pointwise `f(self, other)` on the merged grid; `f` must preserve monotonicity.
    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        let grid = self.merged_breaks(other);
        let values = grid
            .iter()
            .map(|t| {
                let a = &self.values[self.piece_index(t)];
                let b = &other.values[other.piece_index(t)];
                f(a, b)
            })
            .collect();
        Ok(StepQuantile::new(grid, values)?.simplified())
    }

    /// Exact `∫_0^1 |Q - P|`, the Wasserstein-1 distance of the two measures.
    pub fn l1_distance(&self, other: &Self) -> Rational {
        let grid = self.merged_breaks(other);
        let mut acc = zero();
        for (s, start) in grid.iter().enumerate() {
            let end = grid.get(s + 1).cloned().unwrap_or_else(one);
            let a = &self.values[self.piece_index(start)];
            let b = &other.values[other.piece_index(start)];
            acc += (end - start) * (a - b).abs();
        }
        acc
    }

    /// `n`-atomic average: on `[(j-1)/n, j/n)` the value `n ∫ Q` over that interval.
    pub fn average_n(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("averaging needs n ≥ 1".into()));
        }
        let nn = int(n as i64);
        let values = (0..n)
            .map(|j| {
                let lo = rational::ratio(j as i64, n as i64);
                let hi = rational::ratio(j as i64 + 1, n as i64);
                self.integral_between(&lo, &hi) * &nn
            })
            .collect();
        StepQuantile::from_atoms(values)
    }

    /// Pointwise `a·self + b·other` with `a, b ≥ 0`.
    pub fn linear_combination(a: &Rational, p: &Self, b: &Rational, q: &Self) -> Result<Self> {
        if a.is_negative() || b.is_negative() {
            return Err(Error::OutOfRange(
                "coefficients of a quantile combination must be nonnegative".into(),
            ));
        }
        p.zip_with(q, |x, y| a * x + b * y)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    /// Quantile function of the pushforward under `x ↦ s·x + a`.
    pub fn pushforward(&self, s: &Rational, a: &Rational) -> Self {
        match s.cmp(&zero()) {
            Ordering::Equal => StepQuantile::constant(a.clone()),
            Ordering::Greater => StepQuantile {
                breaks: self.breaks.clone(),
                values: self.values.iter().map(|v| s * v + a).collect(),
            }
            .simplified(),
            Ordering::Less => {
                // A reflection reverses the order of the atoms.
                let pieces: Vec<Piece> = self.pieces().collect();
                let mut breaks = Vec::with_capacity(pieces.len());
                let mut values = Vec::with_capacity(pieces.len());
                let mut acc = zero();
                for p in pieces.iter().rev() {
                    breaks.push(acc.clone());
                    values.push(s * &p.value + a);
                    acc += p.width();
                }
                StepQuantile { breaks, values }.simplified()
            }
        }
    }

    /// Atoms `(value, weight)` of the represented measure.
    pub fn atoms(&self) -> Vec<(Rational, Rational)> {
        self.pieces().map(|p| (p.value.clone(), p.width())).collect()
    }

    /// Quantile function of `λ·π + (1-λ)·π'`.
    pub fn mixture(lambda: &Rational, p: &Self, q: &Self) -> Result<Self> {
        check_unit(lambda)?;
        let mut atoms = Vec::new();
        let rest = one() - lambda;
        for (x, w) in p.atoms() {
            let w = w * lambda;
            if w.is_positive() {
                atoms.push((x, w));
            }
        }
        for (x, w) in q.atoms() {
            let w = w * &rest;
            if w.is_positive() {
                atoms.push((x, w));
            }
        }
        StepQuantile::from_weighted_atoms(atoms)
    }

    /// Adds `δ` on `[start, 1]`.
    pub fn bump_tail(&self, start: &Rational, delta: &Rational) -> Result<Self> {
        if *start >= one() {
            return Ok(self.clone());
        }
        let step = StepQuantile {
            breaks: if start.is_zero() {
                vec![zero()]
            } else {
                vec![zero(), start.clone()]
            },
            values: if start.is_zero() {
                vec![delta.clone()]
            } else {
                vec![zero(), delta.clone()]
            },
        };
        self.add(&step)
    }

    pub fn map_values(&self, f: impl Fn(&Rational) -> Rational) -> Result<Self> {
        Ok(StepQuantile::new(self.breaks.clone(), self.values.iter().map(f).collect())?.simplified())
    }
}

fn check_unit(lambda: &Rational) -> Result<()> {
    if lambda.is_negative() || *lambda > one() {
        return Err(Error::OutOfRange(format!(
            "λ = {} outside [0, 1]",
            rational::format_rational(lambda)
        )));
    }
    Ok(())
}

/// An ordered triple `(Q1, Q2, Q3)` of step quantile functions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantileTriple {
    pub q1: StepQuantile,
    pub q2: StepQuantile,
    pub q3: StepQuantile,
}

impl QuantileTriple {
    pub fn new(q1: StepQuantile, q2: StepQuantile, q3: StepQuantile) -> Self {
        QuantileTriple { q1, q2, q3 }
    }

    pub fn constant(a: Rational, b: Rational, c: Rational) -> Self {
        QuantileTriple::new(
            StepQuantile::constant(a),
            StepQuantile::constant(b),
            StepQuantile::constant(c),
        )
    }

    /// Quantiles of the Dirac triple `(δ_a, δ_b, δ_{a+b})`.
    pub fn dirac(a: Rational, b: Rational) -> Self {
        let c = &a + &b;
        QuantileTriple::constant(a, b, c)
    }

    pub fn components(&self) -> [&StepQuantile; 3] {
        [&self.q1, &self.q2, &self.q3]
    }

    pub fn try_map(&self, mut f: impl FnMut(&StepQuantile) -> Result<StepQuantile>) -> Result<Self> {
        Ok(QuantileTriple::new(f(&self.q1)?, f(&self.q2)?, f(&self.q3)?))
    }

    /// `∫ (-Q1 - Q2 + Q3)`.
    pub fn trace(&self) -> Rational {
        self.q3.integral() - self.q1.integral() - self.q2.integral()
    }

    pub fn average_n(&self, n: u64) -> Result<Self> {
        self.try_map(|q| q.average_n(n))
    }

    pub fn is_n_atomic(&self, n: u64) -> bool {
        self.components().iter().all(|q| q.is_n_atomic(n))
    }

    pub fn is_n_integral(&self, n: u64) -> bool {
        self.components().iter().all(|q| q.is_n_integral(n))
    }

    /// Smallest `n` for which every component is `n`-atomic.
    pub fn atomicity(&self) -> u64 {
        self.components()
            .iter()
            .map(|q| q.atomicity())
            .fold(1, |acc, a| acc.lcm(&a))
    }

    pub fn same_functions(&self, other: &Self) -> bool {
        self.q1.same_function(&other.q1)
            && self.q2.same_function(&other.q2)
            && self.q3.same_function(&other.q3)
    }

    pub fn l1_distances(&self, other: &Self) -> [Rational; 3] {
        [
            self.q1.l1_distance(&other.q1),
            self.q2.l1_distance(&other.q2),
            self.q3.l1_distance(&other.q3),
        ]
    }

    /// Pointwise `λ·A + (1-λ)·B`.
    pub fn horizontal_combine(lambda: &Rational, a: &Self, b: &Self) -> Result<Self> {
        check_unit(lambda)?;
        let rest = one() - lambda;
        Ok(QuantileTriple::new(
            StepQuantile::linear_combination(lambda, &a.q1, &rest, &b.q1)?,
            StepQuantile::linear_combination(lambda, &a.q2, &rest, &b.q2)?,
            StepQuantile::linear_combination(lambda, &a.q3, &rest, &b.q3)?,
        ))
    }

    /// Componentwise mixture of measures `λ·π + (1-λ)·π'`.
    pub fn vertical_combine(lambda: &Rational, a: &Self, b: &Self) -> Result<Self> {
        Ok(QuantileTriple::new(
            StepQuantile::mixture(lambda, &a.q1, &b.q1)?,
            StepQuantile::mixture(lambda, &a.q2, &b.q2)?,
            StepQuantile::mixture(lambda, &a.q3, &b.q3)?,
        ))
    }

    /// `(s·Q1 + a, s·Q2 + b, s·Q3 + a + b)` as pushforwards of the three measures.
    pub fn dilate_translate(&self, s: &Rational, a: &Rational, b: &Rational) -> Self {
        let ab = a + b;
        QuantileTriple::new(
            self.q1.pushforward(s, a),
            self.q2.pushforward(s, b),
            self.q3.pushforward(s, &ab),
        )
    }

    pub fn values_within_unit(&self) -> bool {
        self.components()
            .iter()
            .all(|q| !q.min_value().is_negative() && *q.max_value() <= one())
    }

    /// `1 - max_i sup Q_i`; defined for `[0, 1]`-valued triples.
    pub fn eta(&self) -> Result<Rational> {
        if !self.values_within_unit() {
            return Err(Error::OutOfRange("η needs values in [0, 1]".into()));
        }
        let top = self
            .components()
            .iter()
            .map(|q| q.max_value().clone())
            .max()
            .expect("three components");
        Ok(one() - top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn step(breaks: &[(i64, i64)], values: &[(i64, i64)]) -> StepQuantile {
        StepQuantile::new(
            breaks.iter().map(|&(p, q)| ratio(p, q)).collect(),
            values.iter().map(|&(p, q)| ratio(p, q)).collect(),
        )
        .unwrap()
    }

    fn two_atom() -> StepQuantile {
        step(&[(0, 1), (1, 2)], &[(0, 1), (1, 1)])
    }

    fn identity_staircase() -> StepQuantile {
        StepQuantile::from_atoms((0..4).map(|j| ratio(j, 4)).collect()).unwrap()
    }

    #[test]
    fn make_step_examples() {
        let c = step(&[(0, 1)], &[(1, 2)]);
        assert_eq!(c.eval(&ratio(1, 3)).unwrap(), ratio(1, 2));
        assert_eq!(two_atom().num_pieces(), 2);
        let err = StepQuantile::new(vec![zero(), ratio(1, 2)], vec![one(), zero()]).unwrap_err();
        assert!(err.to_string().contains("not a quantile function"));
    }

    #[test]
    fn make_step_rejects_malformed_breaks() {
        assert!(StepQuantile::new(vec![ratio(1, 4)], vec![one()]).is_err());
        assert!(StepQuantile::new(vec![zero(), one()], vec![zero(), one()]).is_err());
        assert!(StepQuantile::new(vec![zero(), ratio(1, 2), ratio(1, 2)], vec![zero(); 3]).is_err());
        assert!(StepQuantile::new(vec![zero()], vec![]).is_err());
    }

    #[test]
    fn eval_conventions() {
        let c = StepQuantile::constant(ratio(1, 2));
        assert_eq!(c.eval(&zero()).unwrap(), ratio(1, 2));
        assert_eq!(two_atom().eval(&ratio(1, 2)).unwrap(), one());
        assert_eq!(two_atom().eval(&one()).unwrap(), one());
        assert_eq!(two_atom().eval(&ratio(1, 3)).unwrap(), zero());
        assert!(two_atom().eval(&ratio(3, 2)).is_err());
        assert!(two_atom().eval(&ratio(-1, 2)).is_err());
    }

    #[test]
    fn l1_examples() {
        let q = two_atom();
        assert_eq!(q.l1_distance(&q), zero());
        let d0 = StepQuantile::constant(zero());
        let d1 = StepQuantile::constant(one());
        assert_eq!(d0.l1_distance(&d1), one());
    }

    #[test]
    fn averaging_identity_staircase() {
        let q = identity_staircase();
        let avg = q.average_n(2).unwrap();
        assert_eq!(avg.values(), &[ratio(1, 8), ratio(5, 8)]);
        assert_eq!(avg.breaks(), &[zero(), ratio(1, 2)]);
        // |t_k - avg| over quarters: (1/8 + 1/8 + 1/8 + 1/8) / 4
        assert_eq!(avg.l1_distance(&q), ratio(1, 8));
        assert!(avg.l1_distance(&q) <= ratio(1, 2));
        assert!(q.average_n(0).is_err());
    }

    #[test]
    fn averaging_constant_is_constant() {
        let c = StepQuantile::constant(ratio(2, 7));
        for n in 1..6 {
            assert!(c.average_n(n).unwrap().same_function(&c));
        }
    }

    #[test]
    fn trace_examples() {
        let t = QuantileTriple::dirac(ratio(1, 3), ratio(1, 5));
        assert_eq!(t.trace(), zero());
        let t = QuantileTriple::constant(zero(), zero(), one());
        assert_eq!(t.trace(), one());
    }

    #[test]
    fn horizontal_examples() {
        let a = QuantileTriple::constant(zero(), zero(), zero());
        let b = QuantileTriple::constant(one(), one(), one());
        let mid = QuantileTriple::horizontal_combine(&ratio(1, 2), &a, &b).unwrap();
        assert_eq!(mid, QuantileTriple::constant(ratio(1, 2), ratio(1, 2), ratio(1, 2)));
        let same = QuantileTriple::horizontal_combine(&one(), &b, &a).unwrap();
        assert!(same.same_functions(&b));
        assert!(QuantileTriple::horizontal_combine(&ratio(3, 2), &a, &b).is_err());
    }

    #[test]
    fn vertical_examples() {
        let a = QuantileTriple::constant(zero(), zero(), zero());
        let b = QuantileTriple::constant(one(), one(), one());
        let v = QuantileTriple::vertical_combine(&zero(), &a, &b).unwrap();
        assert!(v.same_functions(&b));
        let v = QuantileTriple::vertical_combine(&ratio(1, 2), &a, &b).unwrap();
        assert_eq!(v.q1, two_atom());
    }

    #[test]
    fn vertical_concatenation_when_supports_separate() {
        let left = identity_staircase().pushforward(&ratio(1, 2), &zero());
        let right = two_atom().pushforward(&ratio(1, 4), &ratio(3, 4));
        let lambda = ratio(1, 3);
        let mixed = StepQuantile::mixture(&lambda, &left, &right).unwrap();
        for k in 0..=60 {
            let t = ratio(k, 60);
            let expected = if t < lambda {
                left.eval(&(&t / &lambda)).unwrap()
            } else {
                right.eval(&((&t - &lambda) / (one() - &lambda))).unwrap()
            };
            assert_eq!(mixed.eval(&t).unwrap(), expected, "t = {t}");
        }
    }

    #[test]
    fn dilate_translate_examples() {
        let q = QuantileTriple::new(two_atom(), identity_staircase(), two_atom());
        assert_eq!(q.dilate_translate(&one(), &zero(), &zero()), q);
        let moved = q.dilate_translate(&ratio(3, 2), &ratio(1, 7), &ratio(-2, 5));
        assert_eq!(moved.trace(), ratio(3, 2) * q.trace());
        let dirac = QuantileTriple::constant(zero(), zero(), zero());
        let moved = dirac.dilate_translate(&one(), &ratio(1, 4), &ratio(1, 3));
        assert_eq!(moved, QuantileTriple::dirac(ratio(1, 4), ratio(1, 3)));
    }

    #[test]
    fn negative_dilation_reverses_atoms() {
        let q = step(&[(0, 1), (1, 4)], &[(0, 1), (1, 1)]);
        let r = q.pushforward(&int(-1), &zero());
        assert_eq!(r, step(&[(0, 1), (3, 4)], &[(-1, 1), (0, 1)]));
        assert_eq!(r.integral(), -q.integral());
    }

    #[test]
    fn eta_examples() {
        let t = QuantileTriple::constant(ratio(1, 2), ratio(1, 2), ratio(1, 2));
        assert_eq!(t.eta().unwrap(), ratio(1, 2));
        let t = QuantileTriple::new(two_atom(), two_atom(), two_atom());
        assert_eq!(t.eta().unwrap(), zero());
        let t = QuantileTriple::constant(ratio(3, 2), zero(), zero());
        assert!(t.eta().is_err());
    }

    #[test]
    fn atomicity_detection() {
        let q = step(&[(0, 1), (1, 3), (2, 3)], &[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(q.atomicity(), 3);
        assert!(q.is_n_atomic(6));
        assert!(!q.is_n_atomic(2));
        let q = step(&[(0, 1), (1, 2), (2, 3)], &[(0, 1), (0, 1), (1, 1)]);
        assert_eq!(q.atomicity(), 3);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let q = step(&[(0, 1), (1, 3), (2, 3)], &[(0, 1), (1, 6), (1, 2)]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"breaks":["0","1/3","2/3"],"values":["0","1/6","1/2"]}"#);
        let back: StepQuantile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        let bad = r#"{"breaks":["0","1/2"],"values":["1","0"]}"#;
        assert!(serde_json::from_str::<StepQuantile>(bad).is_err());
    }

    #[test]
    fn bump_tail_adds_on_top_fraction() {
        let q = identity_staircase();
        let b = q.bump_tail(&ratio(1, 2), &ratio(1, 8)).unwrap();
        assert_eq!(b.eval(&ratio(1, 4)).unwrap(), ratio(1, 4));
        assert_eq!(b.eval(&ratio(1, 2)).unwrap(), ratio(5, 8));
        let all = q.bump_tail(&zero(), &one()).unwrap();
        assert_eq!(all.integral(), q.integral() + one());
    }
}
