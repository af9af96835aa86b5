//! The memoized back-and-forth recursion and its stabilization table.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::atoms::{closure, r0_from_closure, r0_function_free, Atoms};
use super::position::{CanonicalPosition, Pair, PairSpace};
use crate::clocks::Rank;
use crate::error::{Error, Result};
use crate::lang::WeakModulus;
use crate::rational::Rational;
use crate::structure::FiniteStructure;

/// Structures with at most this many pairs get their full table computed
/// on first use.
pub const AUTO_TABLE_PAIRS: usize = 16;
/// Upper limit on free pairs for an explicit stabilization table.
pub const MAX_TABLE_PAIRS: usize = 22;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => write!(f, "A"),
            Side::B => write!(f, "B"),
        }
    }
}

/// A spoiler option: an element on one side, with the pairs each
/// duplicator response would pledge.
#[derive(Clone, Debug)]
pub struct Challenge {
    pub side: Side,
    pub sort: usize,
    pub elem: usize,
    pub responses: Vec<Pair>,
    indices: Vec<usize>,
}

/// The pseudo-distance on a fixed pair of structures, with memo tables.
pub struct PseudoDistance {
    a: FiniteStructure,
    b: FiniteStructure,
    omega: WeakModulus,
    depth: usize,
    space: PairSpace,
    atoms: Atoms,
    constants: Vec<Pair>,
    challenges: Vec<Challenge>,
    r0_memo: RefCell<HashMap<u128, u32>>,
    memo: RefCell<HashMap<(u128, u64), u32>>,
    table: OnceCell<Option<DistanceTable>>,
}

impl PseudoDistance {
    pub fn new(a: &FiniteStructure, b: &FiniteStructure, omega: &WeakModulus, depth: usize) -> Result<Self> {
        if a.language() != b.language() {
            return Err(Error::Invalid("structures have different languages".into()));
        }
        let space = PairSpace::new(a, b)?;
        let atoms = Atoms::new(a, b, &space, omega);
        let lang = a.language();
        let constants = lang
            .constants
            .iter()
            .enumerate()
            .map(|(c, decl)| Pair::new(lang.sort_index(&decl.sort).expect("validated"), a.constant_value(c), b.constant_value(c)))
            .collect();
        let mut challenges = Vec::new();
        for side in [Side::A, Side::B] {
            for sort in 0..a.sort_count() {
                let (mine, theirs) = match side {
                    Side::A => (a.size(sort), b.size(sort)),
                    Side::B => (b.size(sort), a.size(sort)),
                };
                for elem in 0..mine {
                    let responses: Vec<Pair> = (0..theirs)
                        .map(|r| match side {
                            Side::A => Pair::new(sort, elem, r),
                            Side::B => Pair::new(sort, r, elem),
                        })
                        .collect();
                    let indices = responses.iter().map(|&p| space.index(p)).collect();
                    challenges.push(Challenge { side, sort, elem, responses, indices });
                }
            }
        }
        Ok(PseudoDistance {
            a: a.clone(),
            b: b.clone(),
            omega: omega.clone(),
            depth,
            space,
            atoms,
            constants,
            challenges,
            r0_memo: RefCell::default(),
            memo: RefCell::default(),
            table: OnceCell::new(),
        })
    }

    pub fn a(&self) -> &FiniteStructure {
        &self.a
    }

    pub fn b(&self) -> &FiniteStructure {
        &self.b
    }

    pub fn omega(&self) -> &WeakModulus {
        &self.omega
    }

    pub fn closure_depth(&self) -> usize {
        self.depth
    }

    pub fn pair_count(&self) -> usize {
        self.space.total
    }

    /// The sorted set of possible atomic gaps; every distance is one of them.
    pub fn lattice(&self) -> &[Rational] {
        &self.atoms.lattice
    }

    pub fn value(&self, idx: u32) -> &Rational {
        &self.atoms.lattice[idx as usize]
    }

    pub fn challenges(&self) -> &[Challenge] {
        &self.challenges
    }

    pub fn mask(&self, p: &CanonicalPosition) -> u128 {
        self.space.mask(p)
    }

    pub fn pair_index(&self, p: Pair) -> usize {
        self.space.index(p)
    }

    pub fn position(&self, mask: u128) -> CanonicalPosition {
        self.space.position(mask)
    }

    pub fn top(&self) -> u32 {
        self.atoms.top()
    }

    fn compute_r0(&self, mask: u128) -> u32 {
        let pledged = self.space.position(mask);
        if self.a.language().is_function_free() {
            let mut entries: Vec<(Pair, bool)> = pledged.pairs().map(|&p| (p, true)).collect();
            entries.extend(self.constants.iter().map(|&p| (p, false)));
            r0_function_free(&self.atoms, &self.space, &self.a, &self.b, &entries)
        } else {
            let pairs: Vec<Pair> = pledged.pairs().copied().collect();
            let cl = closure(&self.a, &self.b, &pairs, self.depth);
            r0_from_closure(&self.atoms, &self.space, &self.a, &self.b, &self.omega, &cl)
        }
    }

    pub fn r0_index(&self, mask: u128) -> u32 {
        if let Some(&v) = self.r0_memo.borrow().get(&mask) {
            return v;
        }
        let v = self.compute_r0(mask);
        self.r0_memo.borrow_mut().insert(mask, v);
        v
    }

    pub fn r0(&self, p: &CanonicalPosition) -> Rational {
        self.value(self.r0_index(self.mask(p))).clone()
    }

    /// The full table when the structures are small enough.
    pub fn table(&self) -> Option<&DistanceTable> {
        self.table
            .get_or_init(|| {
                (self.space.total <= AUTO_TABLE_PAIRS)
                    .then(|| self.stabilize(&CanonicalPosition::empty()).expect("within limits"))
            })
            .as_ref()
    }

    /// The stabilization rank, when the full table is available.
    pub fn alpha_star(&self) -> Option<u64> {
        self.table().map(DistanceTable::alpha_star)
    }

    /// `r_k` at a position mask, as a lattice index.
    pub fn r_index(&self, k: u64, mask: u128) -> u32 {
        if let Some(t) = self.table() {
            return t.get(k, mask);
        }
        self.r_dp(k, mask)
    }

    fn r_dp(&self, k: u64, p: u128) -> u32 {
        let base = self.r0_index(p);
        let top = self.top();
        if k == 0 || base == top {
            return base;
        }
        if let Some(&v) = self.memo.borrow().get(&(p, k)) {
            return v;
        }
        let mut best = base;
        'outer: for ch in &self.challenges {
            let mut m = top;
            for &i in &ch.indices {
                m = m.min(self.r_dp(k - 1, p | 1u128 << i));
                if m <= best {
                    continue 'outer;
                }
            }
            best = m;
            if best == top {
                break;
            }
        }
        self.memo.borrow_mut().insert((p, k), best);
        best
    }

    /// Lattice index of `r` at a rank; infinite ranks need the full table.
    pub fn rank_index(&self, rank: Rank, mask: u128) -> Result<u32> {
        match rank {
            Rank::Finite(k) => Ok(self.r_index(k, mask)),
            Rank::Infinite => self
                .table()
                .map(|t| t.get(t.alpha_star(), mask))
                .ok_or_else(|| self.too_large()),
        }
    }

    pub fn r(&self, rank: Rank, p: &CanonicalPosition) -> Result<Rational> {
        Ok(self.value(self.rank_index(rank, self.mask(p))?).clone())
    }

    /// Values `r_k(p ∪ {response})` for each response to a challenge.
    pub fn response_values(&self, k: u64, mask: u128, ch: &Challenge) -> Vec<u32> {
        ch.indices.iter().map(|&i| self.r_index(k, mask | 1u128 << i)).collect()
    }

    pub(crate) fn too_large(&self) -> Error {
        Error::TooLarge(format!(
            "{} element pairs; stabilization needs at most {AUTO_TABLE_PAIRS}",
            self.space.total
        ))
    }

    /// Iterates the recursion over every superset of `base` until the whole
    /// table repeats.
    pub fn stabilize(&self, base: &CanonicalPosition) -> Result<DistanceTable> {
        let base_mask = self.mask(base);
        let free: Vec<usize> = (0..self.space.total).filter(|&i| base_mask >> i & 1 == 0).collect();
        if free.len() > MAX_TABLE_PAIRS {
            return Err(Error::TooLarge(format!("{} free pairs (limit {MAX_TABLE_PAIRS})", free.len())));
        }
        let mut bit_of = vec![None; self.space.total];
        for (bit, &i) in free.iter().enumerate() {
            bit_of[i] = Some(bit);
        }
        let expand = |q: usize| -> u128 {
            free.iter().enumerate().fold(base_mask, |m, (bit, &i)| if q >> bit & 1 == 1 { m | 1u128 << i } else { m })
        };
        let n = 1usize << free.len();
        let first: Vec<u32> = (0..n).map(|q| self.compute_r0(expand(q))).collect();
        let moves: Vec<Vec<usize>> = self
            .challenges
            .iter()
            .map(|ch| ch.indices.iter().map(|&i| bit_of[i].map_or(0, |b| 1usize << b)).collect())
            .collect();
        let mut tables = vec![first];
        loop {
            let prev = tables.last().expect("nonempty");
            let next: Vec<u32> = (0..n)
                .map(|q| {
                    moves
                        .iter()
                        .map(|resp| resp.iter().map(|&bit| prev[q | bit]).min().expect("nonempty universe"))
                        .max()
                        .unwrap_or(prev[q])
                })
                .collect();
            if &next == prev {
                break;
            }
            if tables.len() > MAX_ITERATIONS {
                return Err(Error::TooLarge("stabilization did not converge".into()));
            }
            tables.push(next);
        }
        Ok(DistanceTable { base_mask, free, bit_of, tables, lattice: self.atoms.lattice.clone(), space: self.space.clone() })
    }
}

/// `r_α(q)` for every `q ⊇ base` and every `α ≤ αstar`, where `αstar` is
/// the first rank at which the whole table repeats.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    base_mask: u128,
    free: Vec<usize>,
    bit_of: Vec<Option<usize>>,
    tables: Vec<Vec<u32>>,
    lattice: Vec<Rational>,
    space: PairSpace,
}

impl DistanceTable {
    pub fn alpha_star(&self) -> u64 {
        (self.tables.len() - 1) as u64
    }

    pub fn base(&self) -> CanonicalPosition {
        self.space.position(self.base_mask)
    }

    fn slot(&self, mask: u128) -> usize {
        if self.base_mask == 0 {
            return mask as usize;
        }
        debug_assert_eq!(mask & self.base_mask, self.base_mask, "position below the table base");
        (0..self.space.total)
            .filter(|&i| mask >> i & 1 == 1)
            .filter_map(|i| self.bit_of[i])
            .fold(0usize, |q, bit| q | 1 << bit)
    }

    pub(crate) fn get(&self, k: u64, mask: u128) -> u32 {
        let k = k.min(self.alpha_star()) as usize;
        self.tables[k][self.slot(mask)]
    }

    /// `r_α(q)`; infinite ranks read the stabilized value.
    pub fn value(&self, q: &CanonicalPosition, alpha: Rank) -> Option<Rational> {
        let mask = self.space.mask(q);
        if mask & self.base_mask != self.base_mask {
            return None;
        }
        let k = match alpha {
            Rank::Finite(k) => k,
            Rank::Infinite => self.alpha_star(),
        };
        Some(self.lattice[self.get(k, mask) as usize].clone())
    }

    /// Every position of the table with its stabilized value.
    pub fn entries(&self) -> Vec<(CanonicalPosition, Rational)> {
        let last = self.tables.last().expect("nonempty");
        (0..last.len())
            .map(|q| {
                let mask = self.free.iter().enumerate().fold(self.base_mask, |m, (bit, &i)| {
                    if q >> bit & 1 == 1 {
                        m | 1u128 << i
                    } else {
                        m
                    }
                });
                (self.space.position(mask), self.lattice[last[q] as usize].clone())
            })
            .collect()
    }
}
