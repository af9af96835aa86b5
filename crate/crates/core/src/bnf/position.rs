//! Pledged pairs and canonical positions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::FiniteStructure;

/// A pledged pair: `a` in A's universe of `sort`, `b` in B's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub sort: usize,
    pub a: usize,
    pub b: usize,
}

impl Pair {
    pub fn new(sort: usize, a: usize, b: usize) -> Self {
        Pair { sort, a, b }
    }

    pub fn transposed(self) -> Self {
        Pair { sort: self.sort, a: self.b, b: self.a }
    }
}

/// A game position up to permutation and duplication: a set of pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalPosition {
    pairs: BTreeSet<Pair>,
}

impl CanonicalPosition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, p: &Pair) -> bool {
        self.pairs.contains(p)
    }

    pub fn insert(&mut self, p: Pair) -> bool {
        self.pairs.insert(p)
    }

    pub fn with(&self, p: Pair) -> Self {
        let mut out = self.clone();
        out.insert(p);
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        CanonicalPosition { pairs: self.pairs.union(&other.pairs).copied().collect() }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn transposed(&self) -> Self {
        self.pairs.iter().map(|p| p.transposed()).collect()
    }

    /// `{(a, c) : (a, b) ∈ self, (b, c) ∈ other}`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for p in &self.pairs {
            for q in &other.pairs {
                if p.sort == q.sort && p.b == q.a {
                    out.insert(Pair::new(p.sort, p.a, q.b));
                }
            }
        }
        out
    }

    /// Builds a position from `(A id, B id)` pairs.
    pub fn from_ids(a: &FiniteStructure, b: &FiniteStructure, ids: &[(String, String)]) -> Result<Self> {
        let mut out = Self::default();
        for (x, y) in ids {
            let ea = a.find(x).ok_or_else(|| Error::Unknown { kind: "element", name: x.clone() })?;
            let eb = b.find(y).ok_or_else(|| Error::Unknown { kind: "element", name: y.clone() })?;
            if ea.sort != eb.sort {
                return Err(Error::SortMismatch(format!("{x} and {y} have different sorts")));
            }
            out.insert(Pair::new(ea.sort, ea.index, eb.index));
        }
        Ok(out)
    }

    pub fn to_ids(&self, a: &FiniteStructure, b: &FiniteStructure) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .map(|p| (a.universe(p.sort)[p.a].clone(), b.universe(p.sort)[p.b].clone()))
            .collect()
    }
}

impl FromIterator<Pair> for CanonicalPosition {
    fn from_iter<I: IntoIterator<Item = Pair>>(iter: I) -> Self {
        CanonicalPosition { pairs: iter.into_iter().collect() }
    }
}

/// Dense numbering of all pairs, sort by sort.
#[derive(Clone, Debug)]
pub(crate) struct PairSpace {
    pub sizes_a: Vec<usize>,
    pub sizes_b: Vec<usize>,
    pub offsets: Vec<usize>,
    pub total: usize,
}

pub(crate) const MAX_PAIRS: usize = 128;

impl PairSpace {
    pub fn new(a: &FiniteStructure, b: &FiniteStructure) -> Result<Self> {
        let sizes_a: Vec<_> = (0..a.sort_count()).map(|s| a.size(s)).collect();
        let sizes_b: Vec<_> = (0..b.sort_count()).map(|s| b.size(s)).collect();
        let mut offsets = Vec::new();
        let mut total = 0;
        for (x, y) in sizes_a.iter().zip(&sizes_b) {
            offsets.push(total);
            total += x * y;
        }
        if total > MAX_PAIRS {
            return Err(Error::TooLarge(format!("{total} element pairs (limit {MAX_PAIRS})")));
        }
        Ok(PairSpace { sizes_a, sizes_b, offsets, total })
    }

    pub fn index(&self, p: Pair) -> usize {
        self.offsets[p.sort] + p.a * self.sizes_b[p.sort] + p.b
    }

    pub fn pair(&self, idx: usize) -> Pair {
        let sort = (0..self.offsets.len())
            .find(|&s| idx < self.offsets[s] + self.block(s))
            .expect("pair index in range");
        let local = idx - self.offsets[sort];
        Pair::new(sort, local / self.sizes_b[sort], local % self.sizes_b[sort])
    }

    /// Index of a pair within its sort's block.
    pub fn local(&self, p: Pair) -> usize {
        p.a * self.sizes_b[p.sort] + p.b
    }

    pub fn block(&self, sort: usize) -> usize {
        self.sizes_a[sort] * self.sizes_b[sort]
    }

    pub fn mask(&self, p: &CanonicalPosition) -> u128 {
        p.pairs().fold(0u128, |m, &q| m | 1u128 << self.index(q))
    }

    pub fn position(&self, mask: u128) -> CanonicalPosition {
        (0..self.total).filter(|&i| mask >> i & 1 == 1).map(|i| self.pair(i)).collect()
    }
}
