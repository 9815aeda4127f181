//! Horn index sets.
//!
//! `U^n_r` is the set of triples `(I, J, K)` of `r`-subsets of `{1..n}` with
//! `ΣI + ΣJ = ΣK + r(r+1)/2`; `T^n_r ⊆ U^n_r` is cut out recursively by the
//! inequalities indexed by `T^r_p`, `p < r`. Enumerations are memoized per
//! `(n, r)` in a process-wide cache that is append-only.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantile::{QuantileTriple, StepQuantile};
use crate::rational::{self, Rational};

/// Largest `C(n, r)^3` that full enumeration will attempt.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawHorn", into = "RawHorn")]
pub struct HornTriple {
    n: u32,
    r: u32,
    i: Vec<u32>,
    j: Vec<u32>,
    k: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawHorn {
    n: u32,
    r: u32,
    #[serde(rename = "I")]
    i: Vec<u32>,
    #[serde(rename = "J")]
    j: Vec<u32>,
    #[serde(rename = "K")]
    k: Vec<u32>,
}

impl TryFrom<RawHorn> for HornTriple {
    type Error = Error;

    fn try_from(raw: RawHorn) -> Result<Self> {
        HornTriple::new(raw.n, raw.r, raw.i, raw.j, raw.k)
    }
}

impl From<HornTriple> for RawHorn {
    fn from(h: HornTriple) -> Self {
        RawHorn {
            n: h.n,
            r: h.r,
            i: h.i,
            j: h.j,
            k: h.k,
        }
    }
}

fn check_subset(name: &str, set: &[u32], n: u32, r: u32) -> Result<()> {
    if set.len() != r as usize {
        return Err(Error::MalformedSubset(format!(
            "{name} has {} elements, expected {r}",
            set.len()
        )));
    }
    if set.iter().any(|&x| x < 1 || x > n) {
        return Err(Error::MalformedSubset(format!("{name} = {set:?} leaves 1..={n}")));
    }
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::MalformedSubset(format!("{name} = {set:?} is not strictly increasing")));
    }
    Ok(())
}

fn check_range(n: u32, r: u32) -> Result<()> {
    if r < 1 || r + 1 > n {
        return Err(Error::OutOfRange(format!("need 1 ≤ r ≤ n-1, got n = {n}, r = {r}")));
    }
    Ok(())
}

impl HornTriple {
    pub fn new(n: u32, r: u32, i: Vec<u32>, j: Vec<u32>, k: Vec<u32>) -> Result<Self> {
        check_range(n, r)?;
        check_subset("I", &i, n, r)?;
        check_subset("J", &j, n, r)?;
        check_subset("K", &k, n, r)?;
        Ok(HornTriple { n, r, i, j, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn i(&self) -> &[u32] {
        &self.i
    }

    pub fn j(&self) -> &[u32] {
        &self.j
    }

    pub fn k(&self) -> &[u32] {
        &self.k
    }

    pub fn sets(&self) -> [&[u32]; 3] {
        [&self.i, &self.j, &self.k]
    }

    /// The ratio `r/n`, the shift paired with this triple's inequality.
    pub fn shift(&self) -> Rational {
        rational::ratio(self.r as i64, self.n as i64)
    }

    /// Membership in `U^n_r`.
    pub fn in_u(&self) -> bool {
        let sum = |s: &[u32]| s.iter().map(|&x| x as u64).sum::<u64>();
        let r = self.r as u64;
        sum(&self.i) + sum(&self.j) == sum(&self.k) + r * (r + 1) / 2
    }

    /// Membership in `T^n_r` through the integer recursion.
    pub fn in_t(&self) -> Result<bool> {
        self.in_t_via(MembershipPath::Integer)
    }

    pub fn in_t_via(&self, path: MembershipPath) -> Result<bool> {
        match path {
            MembershipPath::Integer => {
                if !self.in_u() {
                    return Ok(false);
                }
                for p in 1..self.r {
                    let lower = enumerate_t(self.r, p)?;
                    if !lower.iter().all(|w| self.satisfies(w)) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            MembershipPath::Functional => crate::functional::in_t_functional(self),
        }
    }

    /// `Σ_F i_f + Σ_G j_g ≤ Σ_H k_h + p(p+1)/2` for a witness `(F, G, H) ∈ T^r_p`.
    pub fn satisfies(&self, w: &HornTriple) -> bool {
        debug_assert_eq!(w.n, self.r);
        let pick = |set: &[u32], idx: &[u32]| -> i64 {
            idx.iter().map(|&f| set[(f - 1) as usize] as i64).sum()
        };
        let p = w.r as i64;
        pick(&self.i, &w.i) + pick(&self.j, &w.j) <= pick(&self.k, &w.k) + p * (p + 1) / 2
    }

    /// `𝐐_{I,J,K,n}`: component values `(i_s - s)/n` on `[(s-1)/r, s/r)`.
    pub fn embed(&self) -> QuantileTriple {
        let comp = |set: &[u32]| {
            let values = set
                .iter()
                .enumerate()
                .map(|(s, &x)| rational::ratio(x as i64 - (s as i64 + 1), self.n as i64))
                .collect();
            StepQuantile::from_atoms(values).expect("index sets are increasing")
        };
        QuantileTriple::new(comp(&self.i), comp(&self.j), comp(&self.k))
    }

    /// Inverse of [`HornTriple::embed`] on `n`-integral, `r`-atomic triples valued in `[0, 1-r/n]`.
    pub fn decode(q: &QuantileTriple, n: u32, r: u32) -> Result<Self> {
        check_range(n, r)?;
        if !q.is_n_atomic(r as u64) {
            return Err(Error::Precondition(format!("triple is not {r}-atomic")));
        }
        if !q.is_n_integral(n as u64) {
            return Err(Error::Precondition(format!("triple is not {n}-integral")));
        }
        let top = rational::one() - rational::ratio(r as i64, n as i64);
        let mut sets = Vec::with_capacity(3);
        for comp in q.components() {
            if comp.min_value() < &rational::zero() || comp.max_value() > &top {
                return Err(Error::ShiftRegime(format!(
                    "values [{}, {}] escape [0, {}]",
                    rational::format_rational(comp.min_value()),
                    rational::format_rational(comp.max_value()),
                    rational::format_rational(&top)
                )));
            }
            let set = (1..=r)
                .map(|s| {
                    let v = comp.eval(&rational::ratio(s as i64 - 1, r as i64))?;
                    let scaled = v * rational::int(n as i64);
                    let idx: i64 = scaled
                        .to_integer()
                        .try_into()
                        .map_err(|_| Error::Invariant("index overflow".into()))?;
                    Ok((idx + s as i64) as u32)
                })
                .collect::<Result<Vec<u32>>>()?;
            sets.push(set);
        }
        let k = sets.pop().unwrap();
        let j = sets.pop().unwrap();
        let i = sets.pop().unwrap();
        HornTriple::new(n, r, i, j, k)
    }

    /// `(mI, mJ, mK)` at `(mn, mr)`, where `mI = ∪_{i∈I} {mi-m+1, …, mi}`.
    pub fn dilate(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("dilation factor must be ≥ 1".into()));
        }
        let blow = |set: &[u32]| -> Vec<u32> {
            set.iter()
                .flat_map(|&x| (m * x - m + 1)..=(m * x))
                .collect()
        };
        HornTriple::new(self.n * m, self.r * m, blow(&self.i), blow(&self.j), blow(&self.k))
    }

    /// The same index sets regarded inside `{1..n'}` for `n' ≥ n`.
    pub fn widen(&self, n: u32) -> Result<Self> {
        HornTriple::new(n, self.r, self.i.clone(), self.j.clone(), self.k.clone())
    }

    pub fn partitions(&self) -> [Partition; 3] {
        [
            Partition::of(&self.i).expect("validated"),
            Partition::of(&self.j).expect("validated"),
            Partition::of(&self.k).expect("validated"),
        ]
    }
}

impl std::fmt::Display for HornTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(I={:?}, J={:?}, K={:?}; n={}, r={})",
            self.i, self.j, self.k, self.n, self.r
        )
    }
}

/// Which of the two independent routes decides `T^n_r` membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MembershipPath {
    /// Integer sums of the recursive definition.
    #[default]
    Integer,
    /// Sign of the composition functional against embedded lower-rank witnesses.
    Functional,
}

/// `λ(I) = (i_r - r, …, i_1 - 1)`, a nonincreasing list of nonnegative parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition(pub Vec<u32>);

impl Partition {
    pub fn of(set: &[u32]) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::MalformedSubset("empty subset".into()));
        }
        if set.iter().any(|&x| x < 1) || set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedSubset(format!("{set:?} is not an increasing subset of 1..")));
        }
        Ok(Partition(
            set.iter()
                .enumerate()
                .rev()
                .map(|(s, &x)| x - (s as u32 + 1))
                .collect(),
        ))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }
}

/// `λ(I)` for an `r`-subset.
pub fn partition_of(set: &[u32], r: usize) -> Result<Partition> {
    if set.len() != r {
        return Err(Error::MalformedSubset(format!(
            "subset has {} elements, expected {r}",
            set.len()
        )));
    }
    Partition::of(set)
}

pub fn binomial(n: u32, r: u32) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r) as u128;
    let n = n as u128;
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// All `r`-subsets of `{1..n}` in lexicographic order.
pub fn subsets(n: u32, r: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..=(n + 1 - left) {
            cur.push(x);
            go(x + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, r) as usize);
    go(1, n, r, &mut Vec::with_capacity(r as usize), &mut out);
    out
}

fn check_cap(n: u32, r: u32) -> Result<()> {
    let c = binomial(n, r);
    let candidates = c.saturating_mul(c).saturating_mul(c);
    if candidates > ENUMERATION_CAP {
        return Err(Error::SizeCap {
            candidates,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// `U^n_r` in lexicographic order of `(I, J, K)`.
pub fn enumerate_u(n: u32, r: u32) -> Result<Vec<HornTriple>> {
    check_range(n, r)?;
    check_cap(n, r)?;
    let all = subsets(n, r);
    let sum = |s: &[u32]| s.iter().map(|&x| x as u64).sum::<u64>();
    let mut by_sum: HashMap<u64, Vec<usize>> = HashMap::new();
    for (idx, s) in all.iter().enumerate() {
        by_sum.entry(sum(s)).or_default().push(idx);
    }
    let offset = (r as u64) * (r as u64 + 1) / 2;
    let mut out = Vec::new();
    for a in &all {
        for b in &all {
            let total = sum(a) + sum(b);
            if total < offset {
                continue;
            }
            if let Some(ks) = by_sum.get(&(total - offset)) {
                for &k in ks {
                    out.push(HornTriple {
                        n,
                        r,
                        i: a.clone(),
                        j: b.clone(),
                        k: all[k].clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

type Cache = RwLock<HashMap<(u32, u32), Arc<Vec<HornTriple>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `T^n_r` in lexicographic order, memoized.
pub fn enumerate_t(n: u32, r: u32) -> Result<Arc<Vec<HornTriple>>> {
    check_range(n, r)?;
    if let Some(hit) = cache().read().expect("cache lock").get(&(n, r)) {
        return Ok(hit.clone());
    }
    let candidates = enumerate_u(n, r)?;
    let set = if r == 1 {
        candidates
    } else {
        // Build every lower level before the parallel filter touches the cache.
        let lower = (1..r)
            .map(|p| enumerate_t(r, p))
            .collect::<Result<Vec<_>>>()?;
        candidates
            .into_par_iter()
            .filter(|h| lower.iter().all(|level| level.iter().all(|w| h.satisfies(w))))
            .collect()
    };
    let set = Arc::new(set);
    cache()
        .write()
        .expect("cache lock")
        .entry((n, r))
        .or_insert_with(|| set.clone());
    Ok(set)
}

/// `T^n_r` for every `1 ≤ r ≤ n-1`, in order of `r`.
pub fn enumerate_t_all(n: u32) -> Result<Vec<Arc<Vec<HornTriple>>>> {
    (1..n).map(|r| enumerate_t(n, r)).collect()
}

/// The `r`-atomic triple with `S_i = s + [i = 3](r+1)/2` on `[(s-1)/r, s/r)`.
pub fn s_triple(r: u32) -> Result<QuantileTriple> {
    if r == 0 {
        return Err(Error::OutOfRange("S-triple needs r ≥ 1".into()));
    }
    let base: Vec<Rational> = (1..=r as i64).map(rational::int).collect();
    let lift = rational::ratio(r as i64 + 1, 2);
    let top: Vec<Rational> = base.iter().map(|v| v + &lift).collect();
    Ok(QuantileTriple::new(
        StepQuantile::from_atoms(base.clone())?,
        StepQuantile::from_atoms(base)?,
        StepQuantile::from_atoms(top)?,
    ))
}
