//! Lower bounds on the pseudo-distance from explicitly enumerated formulas.

use std::collections::HashSet;

use super::position::CanonicalPosition;
use crate::error::{Error, Result};
use crate::lang::{multiset_admissible, Formula, Term, Var, WeakModulus};
use crate::rational::Rational;
use crate::structure::FiniteStructure;

/// Limits for the formula enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LowerBoundBudget {
    /// Connective nesting applied on top of atoms and quantified formulas.
    pub connective_depth: usize,
    /// Distinct value signatures kept per variable context.
    pub max_formulas: usize,
}

impl Default for LowerBoundBudget {
    fn default() -> Self {
        LowerBoundBudget { connective_depth: 2, max_formulas: 600 }
    }
}

/// The best gap found and a formula realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub value: Rational,
    pub witness: Option<Formula>,
}

/// A formula together with its values under every assignment of the
/// context, first in A then in B.
#[derive(Clone)]
struct Entry {
    sig: Vec<Rational>,
    formula: Formula,
}

struct Enumerator<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    omega: &'a WeakModulus,
    budget: LowerBoundBudget,
    constants: Vec<Rational>,
}

fn var(i: usize, s: &FiniteStructure, sort: usize) -> Var {
    Var::new(format!("x{}", i + 1), s.language().sorts[sort].name.clone())
}

#[derive(Clone, Copy)]
enum Arg {
    Var(usize),
    Const(usize),
}

impl<'a> Enumerator<'a> {
    fn atoms(&self, ctx: &[usize]) -> Vec<Entry> {
        let lang = self.a.language();
        let mut shapes: Vec<(Option<usize>, Vec<usize>, Vec<Rational>)> = lang
            .relations
            .iter()
            .enumerate()
            .map(|(r, d)| (Some(r), self.a.arg_sorts(&d.args), d.modulus.coefficients.clone()))
            .collect();
        for s in 0..self.a.sort_count() {
            shapes.push((None, vec![s, s], vec![Rational::one(); 2]));
        }
        let const_sorts: Vec<usize> =
            lang.constants.iter().map(|c| lang.sort_index(&c.sort).expect("validated")).collect();
        let mut out = Vec::new();
        for (rel, sorts, coeffs) in shapes {
            let options: Vec<Vec<Arg>> = sorts
                .iter()
                .map(|&s| {
                    let vars = ctx.iter().enumerate().filter(|(_, &c)| c == s).map(|(i, _)| Arg::Var(i));
                    let consts = const_sorts.iter().enumerate().filter(|(_, &c)| c == s).map(|(i, _)| Arg::Const(i));
                    vars.chain(consts).collect()
                })
                .collect();
            let lens: Vec<_> = options.iter().map(Vec::len).collect();
            super::atoms::for_each_product(&lens, |digits| {
                let args: Vec<Arg> = digits.iter().zip(&options).map(|(&d, o)| o[d]).collect();
                let leaves: Vec<Rational> = args
                    .iter()
                    .zip(&coeffs)
                    .filter(|(a, _)| matches!(a, Arg::Var(_)))
                    .map(|(_, c)| c.clone())
                    .collect();
                if !multiset_admissible(self.omega, &leaves) {
                    return;
                }
                let terms: Vec<Term> = args
                    .iter()
                    .map(|&arg| match arg {
                        Arg::Var(i) => Term::Var(var(i, self.a, ctx[i])),
                        Arg::Const(c) => Term::Const(lang.constants[c].name.clone()),
                    })
                    .collect();
                let formula = match rel {
                    Some(r) => Formula::Rel(lang.relations[r].name.clone(), terms),
                    None => Formula::Dist(terms[0].clone(), terms[1].clone()),
                };
                let mut sig = Vec::new();
                for s in [self.a, self.b] {
                    for t in s.tuples(ctx) {
                        let elem = |arg: Arg| match arg {
                            Arg::Var(i) => t[i],
                            Arg::Const(c) => s.constant_value(c),
                        };
                        let v = match rel {
                            Some(r) => s.relation_value(r, &args.iter().map(|&x| elem(x)).collect::<Vec<_>>()).clone(),
                            None => s.dist(sorts[0], elem(args[0]), elem(args[1])).clone(),
                        };
                        sig.push(v);
                    }
                }
                out.push(Entry { sig, formula });
            });
        }
        out
    }

    fn family(&self, ctx: &mut Vec<usize>, rank: u64) -> Vec<Entry> {
        let len = self.a.tuples(ctx).len() + self.b.tuples(ctx).len();
        let mut seen: HashSet<Vec<Rational>> = HashSet::new();
        let mut all: Vec<Entry> = Vec::new();
        let cap = self.budget.max_formulas;
        let push = |e: Entry, seen: &mut HashSet<Vec<Rational>>, all: &mut Vec<Entry>| -> bool {
            if all.len() < cap && seen.insert(e.sig.clone()) {
                all.push(e);
            }
            all.len() < cap
        };
        for q in &self.constants {
            push(Entry { sig: vec![q.clone(); len], formula: Formula::Value(q.clone()) }, &mut seen, &mut all);
        }
        for e in self.atoms(ctx) {
            push(e, &mut seen, &mut all);
        }
        if rank > 0 {
            for sort in 0..self.a.sort_count() {
                let (na, nb) = (self.a.size(sort), self.b.size(sort));
                let split = self.a.tuples(ctx).len();
                ctx.push(sort);
                let sub = self.family(ctx, rank - 1);
                ctx.pop();
                let bound = var(ctx.len(), self.a, sort);
                for e in sub {
                    let (sa, sb) = e.sig.split_at(split * na);
                    for sup in [true, false] {
                        let reduce = |block: &[Rational]| {
                            let it = block.iter().cloned();
                            if sup { it.max() } else { it.min() }.expect("nonempty universe")
                        };
                        let mut sig: Vec<Rational> = sa.chunks(na).map(reduce).collect();
                        sig.extend(sb.chunks(nb).map(reduce));
                        let formula = if sup {
                            Formula::sup(bound.clone(), e.formula.clone())
                        } else {
                            Formula::inf(bound.clone(), e.formula.clone())
                        };
                        push(Entry { sig, formula }, &mut seen, &mut all);
                    }
                }
            }
        }
        let mut frontier = 0;
        for _ in 0..self.budget.connective_depth {
            let level_end = all.len();
            let mut fresh = Vec::new();
            'gen: for j in frontier..level_end {
                for q in &self.constants {
                    let x = &all[j];
                    let monus = Entry {
                        sig: x.sig.iter().map(|v| v.monus(q)).collect(),
                        formula: Formula::monus(x.formula.clone(), q.clone()),
                    };
                    let rev = Entry {
                        sig: x.sig.iter().map(|v| q.monus(v)).collect(),
                        formula: Formula::rev_monus(q.clone(), x.formula.clone()),
                    };
                    fresh.push(monus);
                    fresh.push(rev);
                }
                for i in 0..level_end {
                    if i >= frontier && i > j {
                        continue;
                    }
                    let (x, y) = (&all[i], &all[j]);
                    let zip = |f: &dyn Fn(&Rational, &Rational) -> Rational| -> Vec<Rational> {
                        x.sig.iter().zip(&y.sig).map(|(u, v)| f(u, v)).collect()
                    };
                    fresh.push(Entry { sig: zip(&|u, v| u.max(v).clone()), formula: Formula::max(x.formula.clone(), y.formula.clone()) });
                    fresh.push(Entry { sig: zip(&|u, v| u.min(v).clone()), formula: Formula::min(x.formula.clone(), y.formula.clone()) });
                    fresh.push(Entry { sig: zip(&|u, v| u.midpoint(v)), formula: Formula::mid(x.formula.clone(), y.formula.clone()) });
                    if fresh.len() + all.len() > 8 * cap {
                        break 'gen;
                    }
                }
            }
            for e in fresh {
                if !push(e, &mut seen, &mut all) {
                    break;
                }
            }
            frontier = level_end;
        }
        all
    }
}

/// The largest `|φ^A(a) − φ^B(b)|` over the enumerated Ω-formulas of
/// quantifier rank ≤ `alpha`, where `(a, b)` lists the pledged pairs.
pub fn formula_sup_witness(
    a: &FiniteStructure,
    b: &FiniteStructure,
    p: &CanonicalPosition,
    alpha: u64,
    omega: &WeakModulus,
    budget: LowerBoundBudget,
) -> Result<LowerBound> {
    if a.language() != b.language() {
        return Err(Error::Invalid("structures have different languages".into()));
    }
    let e = Enumerator {
        a,
        b,
        omega,
        budget,
        constants: vec![Rational::zero(), Rational::new(1, 2), Rational::one()],
    };
    let pairs: Vec<_> = p.pairs().copied().collect();
    let mut ctx: Vec<usize> = pairs.iter().map(|q| q.sort).collect();
    let family = e.family(&mut ctx, alpha);
    let index = |s: &FiniteStructure, elems: &[usize]| {
        elems.iter().zip(&ctx).fold(0usize, |acc, (&x, &sort)| acc * s.size(sort) + x)
    };
    let ia = index(a, &pairs.iter().map(|q| q.a).collect::<Vec<_>>());
    let ib = a.tuples(&ctx).len() + index(b, &pairs.iter().map(|q| q.b).collect::<Vec<_>>());
    let mut best = LowerBound { value: Rational::zero(), witness: None };
    for entry in family {
        let gap = entry.sig[ia].dist(&entry.sig[ib]);
        if gap > best.value {
            best = LowerBound { value: gap, witness: Some(entry.formula) };
        }
    }
    Ok(best)
}

pub fn formula_sup_lower_bound(
    a: &FiniteStructure,
    b: &FiniteStructure,
    p: &CanonicalPosition,
    alpha: u64,
    omega: &WeakModulus,
    budget: LowerBoundBudget,
) -> Result<Rational> {
    formula_sup_witness(a, b, p, alpha, omega, budget).map(|w| w.value)
}
