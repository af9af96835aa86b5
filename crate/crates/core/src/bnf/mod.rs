//! The back-and-forth pseudo-distance `r_α` between pledged tuples of two
//! finite structures.
//!
//! Positions are sets of pledged pairs. The base distance `r0` is the
//! largest gap of an Ω-admissible atom over the synchronized term closure
//! of the position; `r_{α+1}` is the back-and-forth minimax over one more
//! pledge. Values are indices into the finite lattice of atomic gaps.

mod atoms;
mod distance;
mod lower;
mod position;

use crate::clocks::Rank;
use crate::error::Result;
use crate::lang::WeakModulus;
use crate::rational::Rational;
use crate::structure::FiniteStructure;

pub use atoms::ClosureEntry;
pub use distance::{Challenge, DistanceTable, PseudoDistance, Side, AUTO_TABLE_PAIRS, MAX_TABLE_PAIRS};
pub use lower::{formula_sup_lower_bound, formula_sup_witness, LowerBound, LowerBoundBudget};
pub use position::{CanonicalPosition, Pair};

/// Default term depth for the synchronized closure.
pub const DEFAULT_CLOSURE_DEPTH: usize = 3;

/// The pledged pairs and constant pairs, closed under simultaneous function
/// application to term depth `depth`.
pub fn sync_closure(
    a: &FiniteStructure,
    b: &FiniteStructure,
    p: &CanonicalPosition,
    depth: usize,
) -> Vec<ClosureEntry> {
    let pairs: Vec<Pair> = p.pairs().copied().collect();
    atoms::closure(a, b, &pairs, depth)
        .into_iter()
        .map(|(pair, moduli)| ClosureEntry { pair, moduli })
        .collect()
}

pub fn r0(a: &FiniteStructure, b: &FiniteStructure, p: &CanonicalPosition, omega: &WeakModulus, depth: usize) -> Result<Rational> {
    Ok(PseudoDistance::new(a, b, omega, depth)?.r0(p))
}

/// `r_α(p)`. Finite ranks run the memoized recursion (or read the full
/// table on small structures); the infinite rank reads the stabilized value.
pub fn r_alpha(
    a: &FiniteStructure,
    b: &FiniteStructure,
    p: &CanonicalPosition,
    alpha: Rank,
    omega: &WeakModulus,
    depth: usize,
) -> Result<Rational> {
    let d = PseudoDistance::new(a, b, omega, depth)?;
    match alpha {
        Rank::Finite(_) => d.r(alpha, p),
        Rank::Infinite => r_stab(a, b, p, omega, depth).map(|(v, _)| v),
    }
}

/// The stabilized value at `p` and the first rank `αstar` at which the table
/// over all positions extending `p` repeats.
pub fn r_stab(
    a: &FiniteStructure,
    b: &FiniteStructure,
    p: &CanonicalPosition,
    omega: &WeakModulus,
    depth: usize,
) -> Result<(Rational, u64)> {
    let d = PseudoDistance::new(a, b, omega, depth)?;
    let table = d.stabilize(p)?;
    let value = table.value(p, Rank::Infinite).expect("base position");
    Ok((value, table.alpha_star()))
}

/// `A ≡_α B`: whether `r_α` vanishes at the empty position.
pub fn equiv_bf(a: &FiniteStructure, b: &FiniteStructure, alpha: Rank, omega: &WeakModulus, depth: usize) -> Result<bool> {
    Ok(r_alpha(a, b, &CanonicalPosition::empty(), alpha, omega, depth)?.is_zero())
}
