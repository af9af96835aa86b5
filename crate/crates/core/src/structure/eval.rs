//! Term and formula evaluation.

use std::collections::BTreeMap;

use super::{Elem, FiniteStructure};
use crate::error::{Error, Result};
use crate::lang::{Formula, Term, Var};
use crate::rational::Rational;

/// Assigns each variable an element index in the universe of its sort.
pub type Assignment = BTreeMap<Var, usize>;

pub fn eval_term(s: &FiniteStructure, term: &Term, v: &Assignment) -> Result<Elem> {
    let lang = s.language();
    match term {
        Term::Var(x) => {
            let index = *v.get(x).ok_or_else(|| Error::Unassigned(x.name.clone()))?;
            let sort = lang.sort_id(&x.sort)?;
            if index >= s.size(sort) {
                return Err(Error::SortMismatch(format!("{} is assigned outside sort {}", x.name, x.sort)));
            }
            Ok(Elem { sort, index })
        }
        Term::Const(c) => {
            let idx = lang
                .constants
                .iter()
                .position(|d| &d.name == c)
                .ok_or_else(|| Error::Unknown { kind: "constant", name: c.clone() })?;
            let sort = lang.sort_id(&lang.constants[idx].sort)?;
            Ok(Elem { sort, index: s.constant_value(idx) })
        }
        Term::App(f, args) => {
            term.sort(lang)?;
            let idx = lang.functions.iter().position(|d| &d.name == f).expect("sort-checked");
            let tuple = args
                .iter()
                .map(|a| eval_term(s, a, v).map(|e| e.index))
                .collect::<Result<Vec<_>>>()?;
            let sort = lang.sort_id(&lang.functions[idx].result)?;
            Ok(Elem { sort, index: s.function_value(idx, &tuple) })
        }
    }
}

pub fn eval_formula(s: &FiniteStructure, phi: &Formula, v: &Assignment) -> Result<Rational> {
    phi.check(s.language())?;
    eval_rec(s, phi, &mut v.clone())
}

fn eval_rec(s: &FiniteStructure, phi: &Formula, v: &mut Assignment) -> Result<Rational> {
    Ok(match phi {
        Formula::Rel(r, args) => {
            let idx = s.language().relations.iter().position(|d| &d.name == r).expect("checked");
            let tuple = args
                .iter()
                .map(|a| eval_term(s, a, v).map(|e| e.index))
                .collect::<Result<Vec<_>>>()?;
            s.relation_value(idx, &tuple).clone()
        }
        Formula::Dist(a, b) => {
            let (x, y) = (eval_term(s, a, v)?, eval_term(s, b, v)?);
            s.dist(x.sort, x.index, y.index).clone()
        }
        Formula::Value(q) => q.clone(),
        Formula::Max(a, b) => eval_rec(s, a, v)?.max(eval_rec(s, b, v)?),
        Formula::Min(a, b) => eval_rec(s, a, v)?.min(eval_rec(s, b, v)?),
        Formula::Mid(a, b) => eval_rec(s, a, v)?.midpoint(&eval_rec(s, b, v)?),
        Formula::Monus(a, q) => eval_rec(s, a, v)?.monus(q),
        Formula::RevMonus(q, a) => q.monus(&eval_rec(s, a, v)?),
        Formula::Sup(x, a) | Formula::Inf(x, a) => {
            let sort = s.language().sort_id(&x.sort)?;
            let saved = v.get(x).copied();
            let mut best: Option<Rational> = None;
            for i in 0..s.size(sort) {
                v.insert(x.clone(), i);
                let val = eval_rec(s, a, v)?;
                best = Some(match (best, matches!(phi, Formula::Sup(..))) {
                    (None, _) => val,
                    (Some(b), true) => b.max(val),
                    (Some(b), false) => b.min(val),
                });
            }
            match saved {
                Some(i) => v.insert(x.clone(), i),
                None => v.remove(x),
            };
            best.ok_or_else(|| Error::Invalid(format!("empty universe for sort {}", x.sort)))?
        }
    })
}
