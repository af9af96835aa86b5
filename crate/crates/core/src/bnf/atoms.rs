//! Atomic formulas over pledged pairs: the value lattice, the synchronized
//! term closure and the base distance r0.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::position::{Pair, PairSpace};
use crate::lang::{multiset_admissible, WeakModulus};
use crate::rational::Rational;
use crate::structure::FiniteStructure;

/// Tables with more tuples than this are evaluated on the fly.
const TABLE_LIMIT: usize = 1 << 18;
/// Pareto-minimal coefficient bags kept per closure pair.
const BAGS_PER_PAIR: usize = 32;

/// A relation symbol or the metric of one sort, seen as an atom shape.
pub(crate) struct AtomKind {
    pub rel: Option<usize>,
    pub sorts: Vec<usize>,
    pub coeffs: Vec<Rational>,
    /// Admissibility when exactly the arguments in the bit mask are
    /// variables and the others are constants.
    pub admissible: Vec<bool>,
    table: Option<Vec<u32>>,
    strides: Vec<usize>,
}

pub(crate) struct Atoms {
    pub kinds: Vec<AtomKind>,
    /// Every possible atomic gap, sorted, starting with 0.
    pub lattice: Vec<Rational>,
}

fn values_of(table: &[Rational]) -> BTreeSet<&Rational> {
    table.iter().collect()
}

impl Atoms {
    pub fn new(a: &FiniteStructure, b: &FiniteStructure, space: &PairSpace, omega: &WeakModulus) -> Self {
        let lang = a.language();
        let mut kinds = Vec::new();
        let mut gaps = BTreeSet::from([Rational::zero()]);
        let mut add_gaps = |ta: &[Rational], tb: &[Rational]| {
            for x in values_of(ta) {
                for y in values_of(tb) {
                    gaps.insert(x.dist(y));
                }
            }
        };
        for (r, decl) in lang.relations.iter().enumerate() {
            add_gaps(a.relation_table(r), b.relation_table(r));
            kinds.push((Some(r), a.arg_sorts(&decl.args), decl.modulus.coefficients.clone()));
        }
        for s in 0..a.sort_count() {
            add_gaps(a.metric_table(s), b.metric_table(s));
            kinds.push((None, vec![s, s], vec![Rational::one(); 2]));
        }
        let lattice: Vec<Rational> = gaps.into_iter().collect();
        let kinds = kinds
            .into_iter()
            .map(|(rel, sorts, coeffs)| {
                let m = sorts.len();
                let admissible = (0..1usize << m)
                    .map(|mask| {
                        let leaves: Vec<_> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| coeffs[i].clone()).collect();
                        multiset_admissible(omega, &leaves)
                    })
                    .collect();
                let mut strides = vec![1usize; m];
                for i in (0..m.saturating_sub(1)).rev() {
                    strides[i] = strides[i + 1] * space.block(sorts[i + 1]);
                }
                let mut kind = AtomKind { rel, sorts, coeffs, admissible, table: None, strides };
                let count: usize = kind.sorts.iter().map(|&s| space.block(s)).product();
                if count <= TABLE_LIMIT {
                    let table = tuples(space, &kind.sorts)
                        .iter()
                        .map(|t| index_of(&lattice, &kind.gap(a, b, t)))
                        .collect();
                    kind.table = Some(table);
                }
                kind
            })
            .collect();
        Atoms { kinds, lattice }
    }

    pub fn top(&self) -> u32 {
        (self.lattice.len() - 1) as u32
    }

    pub fn gap_index(&self, kind: &AtomKind, space: &PairSpace, a: &FiniteStructure, b: &FiniteStructure, t: &[Pair]) -> u32 {
        match &kind.table {
            Some(table) => {
                let flat: usize = t.iter().zip(&kind.strides).map(|(&p, s)| space.local(p) * s).sum();
                table[flat]
            }
            None => index_of(&self.lattice, &kind.gap(a, b, t)),
        }
    }
}

fn index_of(lattice: &[Rational], v: &Rational) -> u32 {
    lattice.binary_search(v).expect("gap is in the lattice") as u32
}

impl AtomKind {
    pub fn values(&self, a: &FiniteStructure, b: &FiniteStructure, t: &[Pair]) -> (Rational, Rational) {
        match self.rel {
            Some(r) => {
                let ta: Vec<_> = t.iter().map(|p| p.a).collect();
                let tb: Vec<_> = t.iter().map(|p| p.b).collect();
                (a.relation_value(r, &ta).clone(), b.relation_value(r, &tb).clone())
            }
            None => (a.dist(t[0].sort, t[0].a, t[1].a).clone(), b.dist(t[0].sort, t[0].b, t[1].b).clone()),
        }
    }

    pub fn gap(&self, a: &FiniteStructure, b: &FiniteStructure, t: &[Pair]) -> Rational {
        let (x, y) = self.values(a, b, t);
        x.dist(&y)
    }
}

fn tuples(space: &PairSpace, sorts: &[usize]) -> Vec<Vec<Pair>> {
    let mut out = vec![Vec::new()];
    for &s in sorts {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..space.block(s)).map(move |l| {
                    let mut t = t.clone();
                    t.push(Pair::new(s, l / space.sizes_b[s], l % space.sizes_b[s]));
                    t
                })
            })
            .collect();
    }
    out
}

/// Runs an odometer over the cartesian product of `choices`, calling `f`
/// with the current digit vector.
pub(crate) fn for_each_product(lens: &[usize], mut f: impl FnMut(&[usize])) {
    if lens.contains(&0) {
        return;
    }
    let mut digits = vec![0usize; lens.len()];
    loop {
        f(&digits);
        let mut i = lens.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < lens[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// A pair reached by the synchronized closure together with the
/// Pareto-minimal bags of per-occurrence coefficients of the terms reaching
/// it (each bag sorted in descending order, zeros dropped).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureEntry {
    pub pair: Pair,
    pub moduli: Vec<Vec<Rational>>,
}

fn dominated(bag: &[Rational], by: &[Rational]) -> bool {
    bag.len() == by.len() && by.iter().zip(bag).all(|(x, y)| x <= y)
}

fn insert_bag(bags: &mut Vec<Vec<Rational>>, bag: Vec<Rational>) -> bool {
    if bags.iter().any(|b| dominated(&bag, b)) {
        return false;
    }
    bags.retain(|b| !dominated(b, &bag));
    bags.push(bag);
    bags.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    bags.truncate(BAGS_PER_PAIR);
    true
}

/// Closure of `pledged` and the constant pairs under simultaneous function
/// application, to term depth `depth`.
pub(crate) fn closure(
    a: &FiniteStructure,
    b: &FiniteStructure,
    pledged: &[Pair],
    depth: usize,
) -> BTreeMap<Pair, Vec<Vec<Rational>>> {
    let lang = a.language();
    let mut sets: BTreeMap<Pair, Vec<Vec<Rational>>> = BTreeMap::new();
    for &p in pledged {
        insert_bag(sets.entry(p).or_default(), vec![Rational::one()]);
    }
    for (c, decl) in lang.constants.iter().enumerate() {
        let sort = lang.sort_index(&decl.sort).expect("validated");
        let p = Pair::new(sort, a.constant_value(c), b.constant_value(c));
        insert_bag(sets.entry(p).or_default(), Vec::new());
    }
    for _ in 0..depth {
        let snapshot: Vec<(Pair, Vec<Rational>)> =
            sets.iter().flat_map(|(p, bags)| bags.iter().map(move |bag| (*p, bag.clone()))).collect();
        let mut changed = false;
        for (f, decl) in lang.functions.iter().enumerate() {
            let sorts = a.arg_sorts(&decl.args);
            let result = lang.sort_index(&decl.result).expect("validated");
            let options: Vec<Vec<&(Pair, Vec<Rational>)>> =
                sorts.iter().map(|&s| snapshot.iter().filter(|(p, _)| p.sort == s).collect()).collect();
            let lens: Vec<_> = options.iter().map(Vec::len).collect();
            for_each_product(&lens, |digits| {
                let args: Vec<_> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
                let ta: Vec<_> = args.iter().map(|(p, _)| p.a).collect();
                let tb: Vec<_> = args.iter().map(|(p, _)| p.b).collect();
                let pair = Pair::new(result, a.function_value(f, &ta), b.function_value(f, &tb));
                let mut bag: Vec<Rational> = args
                    .iter()
                    .enumerate()
                    .flat_map(|(i, (_, leaves))| {
                        let c = decl.modulus.coefficient(i);
                        leaves.iter().map(move |l| l * &c).collect::<Vec<_>>()
                    })
                    .filter(|x| !x.is_zero())
                    .collect();
                bag.sort_by(|x, y| y.cmp(x));
                changed |= insert_bag(sets.entry(pair).or_default(), bag);
            });
        }
        if !changed {
            break;
        }
    }
    sets
}

/// `r0` as a lattice index, from an explicit closure.
pub(crate) fn r0_from_closure(
    atoms: &Atoms,
    space: &PairSpace,
    a: &FiniteStructure,
    b: &FiniteStructure,
    omega: &WeakModulus,
    closure: &BTreeMap<Pair, Vec<Vec<Rational>>>,
) -> u32 {
    let top = atoms.top();
    let mut best = 0u32;
    for kind in &atoms.kinds {
        let options: Vec<Vec<(&Pair, &Vec<Vec<Rational>>)>> =
            kind.sorts.iter().map(|&s| closure.iter().filter(|(p, _)| p.sort == s).collect()).collect();
        let lens: Vec<_> = options.iter().map(Vec::len).collect();
        for_each_product(&lens, |digits| {
            if best == top {
                return;
            }
            let args: Vec<_> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
            let t: Vec<Pair> = args.iter().map(|(p, _)| **p).collect();
            let g = atoms.gap_index(kind, space, a, b, &t);
            if g <= best {
                return;
            }
            let bag_lens: Vec<_> = args.iter().map(|(_, bags)| bags.len()).collect();
            let mut ok = false;
            for_each_product(&bag_lens, |choice| {
                if ok {
                    return;
                }
                let leaves: Vec<Rational> = choice
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &c)| args[i].1[c].iter().map(move |l| l * &kind.coeffs[i]))
                    .collect();
                ok = multiset_admissible(omega, &leaves);
            });
            if ok {
                best = g;
            }
        });
    }
    best
}

/// `r0` as a lattice index for a function-free language: the closure is the
/// pledged pairs (variables) plus the constant pairs.
pub(crate) fn r0_function_free(
    atoms: &Atoms,
    space: &PairSpace,
    a: &FiniteStructure,
    b: &FiniteStructure,
    entries: &[(Pair, bool)],
) -> u32 {
    let top = atoms.top();
    let mut best = 0u32;
    let mut t = Vec::new();
    for kind in &atoms.kinds {
        let options: Vec<Vec<&(Pair, bool)>> =
            kind.sorts.iter().map(|&s| entries.iter().filter(|(p, _)| p.sort == s).collect()).collect();
        let lens: Vec<_> = options.iter().map(Vec::len).collect();
        for_each_product(&lens, |digits| {
            if best == top {
                return;
            }
            let mut mask = 0usize;
            t.clear();
            for (i, (&d, o)) in digits.iter().zip(&options).enumerate() {
                let (p, var) = o[d];
                if *var {
                    mask |= 1 << i;
                }
                t.push(*p);
            }
            if !kind.admissible[mask] {
                return;
            }
            best = best.max(atoms.gap_index(kind, space, a, b, &t));
        });
        if best == top {
            break;
        }
    }
    best
}
