//! Friendly, packed and self-characterising subsets of a finite relation.
//!
//! Subsets are `u64` bitmasks over a ground set of at most 64 elements.
//! Exhaustive enumeration is limited to 24 elements; larger ground sets go
//! through maximal-clique search on the mutual-liking graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Subset = u64;

pub const MAX_SIZE: usize = 64;
pub const EXHAUSTIVE_CAP: usize = 24;

/// A relation `L ⊆ X × X`; `likes(x, y)` reads "x likes y".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRelation", into = "RawRelation")]
pub struct FiniteRelation {
    labels: Vec<String>,
    rows: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawRelation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    likes: Vec<Vec<bool>>,
}

impl TryFrom<RawRelation> for FiniteRelation {
    type Error = Error;

    fn try_from(raw: RawRelation) -> Result<Self> {
        FiniteRelation::new(raw.likes, raw.labels)
    }
}

impl From<FiniteRelation> for RawRelation {
    fn from(r: FiniteRelation) -> Self {
        let n = r.size();
        RawRelation {
            likes: (0..n).map(|x| (0..n).map(|y| r.likes(x, y)).collect()).collect(),
            labels: Some(r.labels),
        }
    }
}

fn bit(x: usize) -> Subset {
    1u64 << x
}

/// Indices of the elements of `a`, ascending.
pub fn members(a: Subset) -> Vec<usize> {
    (0..MAX_SIZE).filter(|&x| a & bit(x) != 0).collect()
}

fn ordered(mut sets: Vec<Subset>) -> Vec<Subset> {
    sets.sort_by_key(|&s| members(s));
    sets
}

impl FiniteRelation {
    pub fn new(likes: Vec<Vec<bool>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = likes.len();
        if n > MAX_SIZE {
            return Err(Error::SizeCap {
                candidates: n as u128,
                cap: MAX_SIZE as u128,
            });
        }
        if likes.iter().any(|row| row.len() != n) {
            return Err(Error::Parse("likes table must be square".into()));
        }
        let labels = match labels {
            Some(l) if l.len() != n => {
                return Err(Error::Parse(format!("{} labels for {n} elements", l.len())));
            }
            Some(l) => l,
            None => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        let rows = likes
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, &b)| b).fold(0, |acc, (y, _)| acc | bit(y)))
            .collect();
        Ok(FiniteRelation { labels, rows })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        FiniteRelation::new((0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect(), None)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn likes(&self, x: usize, y: usize) -> bool {
        self.rows[x] & bit(y) != 0
    }

    pub fn ground(&self) -> Subset {
        if self.size() == MAX_SIZE {
            u64::MAX
        } else {
            bit(self.size()) - 1
        }
    }

    /// `{x : xLx}`.
    pub fn self_liking(&self) -> Subset {
        (0..self.size()).filter(|&x| self.likes(x, x)).fold(0, |acc, x| acc | bit(x))
    }

    /// `{y : xLy and yLx}`.
    pub fn mutual(&self, x: usize) -> Subset {
        (0..self.size())
            .filter(|&y| self.likes(x, y) && self.likes(y, x))
            .fold(0, |acc, y| acc | bit(y))
    }

    pub fn subset_labels(&self, a: Subset) -> Vec<String> {
        members(a).into_iter().map(|x| self.labels[x].clone()).collect()
    }

    pub fn subset_from_labels<S: AsRef<str>>(&self, names: &[S]) -> Result<Subset> {
        names.iter().try_fold(0, |acc, name| {
            let name = name.as_ref();
            self.labels
                .iter()
                .position(|l| l == name)
                .map(|x| acc | bit(x))
                .ok_or_else(|| Error::Parse(format!("unknown element {name:?}")))
        })
    }

    fn check_subset(&self, a: Subset) -> Result<()> {
        if a & !self.ground() != 0 {
            return Err(Error::OutOfRange("subset mentions elements outside the ground set".into()));
        }
        Ok(())
    }

    /// Every `x, y ∈ A` satisfy `xLy`.
    pub fn is_friendly(&self, a: Subset) -> bool {
        members(a).into_iter().all(|x| self.rows[x] & a == a)
    }

    /// No `x ∉ A` is self-liking and mutually liking with all of `A`.
    pub fn is_weakly_packed(&self, a: Subset) -> bool {
        (0..self.size())
            .filter(|&x| a & bit(x) == 0)
            .all(|x| !(self.likes(x, x) && self.mutual(x) & a == a))
    }

    /// Every `x ∉ A` dislikes some `y ∈ A`.
    pub fn is_strongly_packed(&self, a: Subset) -> bool {
        (0..self.size())
            .filter(|&x| a & bit(x) == 0)
            .all(|x| self.rows[x] & a != a)
    }

    pub fn verdict(&self, a: Subset) -> Result<SubsetVerdict> {
        self.check_subset(a)?;
        let friendly = self.is_friendly(a);
        let weakly_packed = self.is_weakly_packed(a);
        let strongly_packed = self.is_strongly_packed(a);
        Ok(SubsetVerdict {
            subset: self.subset_labels(a),
            friendly,
            weakly_packed,
            strongly_packed,
            weak_sc: friendly && weakly_packed,
            strong_sc: friendly && strongly_packed,
        })
    }

    fn check_exhaustive(&self) -> Result<()> {
        if self.size() > EXHAUSTIVE_CAP {
            return Err(Error::SizeCap {
                candidates: 1u128 << self.size(),
                cap: 1u128 << EXHAUSTIVE_CAP,
            });
        }
        Ok(())
    }

    fn all_subsets(&self) -> impl Iterator<Item = Subset> {
        0..=self.ground()
    }

    /// Self-characterising sets in the given mode.
    ///
    /// Up to 24 elements the definition is checked on every subset, and in weak
    /// mode the result is compared against the maximal friendly sets. Larger
    /// ground sets use the maximal friendly sets directly.
    pub fn enumerate_sc(&self, mode: ScMode) -> Result<Vec<Subset>> {
        let maximal = self.maximal_friendly_sets();
        if self.size() > EXHAUSTIVE_CAP {
            return Ok(match mode {
                ScMode::Weak => maximal,
                ScMode::Strong => maximal.into_iter().filter(|&a| self.is_strongly_packed(a)).collect(),
            });
        }
        let found = ordered(
            self.all_subsets()
                .filter(|&a| {
                    self.is_friendly(a)
                        && match mode {
                            ScMode::Weak => self.is_weakly_packed(a),
                            ScMode::Strong => self.is_strongly_packed(a),
                        }
                })
                .collect(),
        );
        if mode == ScMode::Weak && found != maximal {
            return Err(Error::Invariant(
                "weakly self-characterising sets differ from the maximal friendly sets".into(),
            ));
        }
        Ok(found)
    }

    /// Maximal friendly sets: maximal cliques of the mutual-liking graph on self-liking elements.
    pub fn maximal_friendly_sets(&self) -> Vec<Subset> {
        self.maximal_friendly_containing(0)
    }

    fn maximal_friendly_containing(&self, e: Subset) -> Vec<Subset> {
        let loops = self.self_liking();
        let adj: Vec<Subset> = (0..self.size()).map(|x| self.mutual(x) & loops & !bit(x)).collect();
        let mut candidates = loops & !e;
        for x in members(e) {
            candidates &= adj[x];
        }
        let mut out = Vec::new();
        bron_kerbosch(&adj, e, candidates, 0, &mut out);
        ordered(out)
    }

    /// Weakly packed sets with no weakly packed strict subset, by exhaustive search.
    pub fn minimal_weakly_packed_sets(&self) -> Result<Vec<Subset>> {
        self.check_exhaustive()?;
        let n = self.size();
        let packed: Vec<bool> = self.all_subsets().map(|a| self.is_weakly_packed(a)).collect();
        // below[a]: some subset of a (a itself included) is weakly packed.
        let mut below = packed.clone();
        for x in 0..n {
            for a in 0..below.len() {
                if a & (1 << x) != 0 && below[a ^ (1 << x)] {
                    below[a] = true;
                }
            }
        }
        let minimal = (0..packed.len())
            .filter(|&a| packed[a] && members(a as Subset).into_iter().all(|x| !below[a ^ (1 << x)]))
            .map(|a| a as Subset)
            .collect();
        Ok(ordered(minimal))
    }

    /// Greedy extension of a friendly set: add the lowest admissible index until none is left.
    pub fn extend_to_weak_sc(&self, e: Subset) -> Result<Subset> {
        self.check_subset(e)?;
        if !self.is_friendly(e) {
            return Err(Error::Precondition("seed set is not friendly".into()));
        }
        let mut a = e;
        for x in 0..self.size() {
            if a & bit(x) == 0 && self.is_friendly(a | bit(x)) {
                a |= bit(x);
            }
        }
        if !(self.is_friendly(a) && self.is_weakly_packed(a)) {
            return Err(Error::Invariant("greedy extension is not weakly self-characterising".into()));
        }
        Ok(a)
    }

    /// Decides whether exactly one weakly self-characterising set contains `e`.
    ///
    /// In the unique case the mutual-liking criterion over self-liking
    /// elements is checked to hold; otherwise it is checked to fail for every candidate.
    pub fn unique_weak_sc_containing(&self, e: Subset) -> Result<UniqueWeakSc> {
        self.check_subset(e)?;
        if !self.is_friendly(e) {
            return Ok(UniqueWeakSc::NoneFriendly);
        }
        let candidates = self.maximal_friendly_containing(e);
        let criterion = |v: Subset| {
            members(self.self_liking())
                .into_iter()
                .all(|x| (self.mutual(x) & e == e) == (self.mutual(x) & v == v))
        };
        match candidates.as_slice() {
            [] => Err(Error::Invariant("friendly set has no maximal friendly extension".into())),
            [v] => {
                if !criterion(*v) {
                    return Err(Error::Invariant("unique extension fails the mutual-liking criterion".into()));
                }
                if e == 0 && *v != self.self_liking() {
                    return Err(Error::Invariant("unique set differs from the self-liking elements".into()));
                }
                Ok(UniqueWeakSc::Unique(*v))
            }
            many => {
                if many.iter().any(|&v| criterion(v)) {
                    return Err(Error::Invariant("criterion holds despite several extensions".into()));
                }
                Ok(UniqueWeakSc::Multiple(many.to_vec()))
            }
        }
    }
}

fn bron_kerbosch(adj: &[Subset], r: Subset, mut p: Subset, mut x: Subset, out: &mut Vec<Subset>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = members(p | x)
        .into_iter()
        .max_by_key(|&u| (adj[u] & p).count_ones())
        .expect("p is nonempty");
    for v in members(p & !adj[pivot]) {
        bron_kerbosch(adj, r | bit(v), p & adj[v], x & adj[v], out);
        p &= !bit(v);
        x |= bit(v);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScMode {
    Weak,
    Strong,
}

impl std::str::FromStr for ScMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(ScMode::Weak),
            "strong" => Ok(ScMode::Strong),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetVerdict {
    pub subset: Vec<String>,
    pub friendly: bool,
    pub weakly_packed: bool,
    pub strongly_packed: bool,
    pub weak_sc: bool,
    pub strong_sc: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniqueWeakSc {
    Unique(Subset),
    Multiple(Vec<Subset>),
    NoneFriendly,
}
