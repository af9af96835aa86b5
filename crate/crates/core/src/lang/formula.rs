//! Finitary formulas over a metric language.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{modulus_dominates, LinearModulus, MetricLanguage, WeakModulus};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A sorted variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub sort: String,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Var { name: name.into(), sort: sort.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(Var),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, sort: &str) -> Self {
        Term::Var(Var::new(name, sort))
    }

    pub fn sort(&self, lang: &MetricLanguage) -> Result<String> {
        match self {
            Term::Var(v) => {
                lang.sort_id(&v.sort)?;
                Ok(v.sort.clone())
            }
            Term::Const(c) => lang
                .constant(c)
                .map(|c| c.sort.clone())
                .ok_or_else(|| Error::Unknown { kind: "constant", name: c.clone() }),
            Term::App(f, args) => {
                let decl = lang.function(f).ok_or_else(|| Error::Unknown { kind: "function", name: f.clone() })?;
                check_args(lang, f, &decl.args, args)?;
                Ok(decl.result.clone())
            }
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Chained linear modulus of the term, per variable.
    pub fn modulus(&self, lang: &MetricLanguage) -> Result<BTreeMap<Var, Rational>> {
        match self {
            Term::Var(v) => Ok(BTreeMap::from([(v.clone(), Rational::one())])),
            Term::Const(_) => Ok(BTreeMap::new()),
            Term::App(f, args) => {
                let decl = lang.function(f).ok_or_else(|| Error::Unknown { kind: "function", name: f.clone() })?;
                let mut out = BTreeMap::new();
                for (i, arg) in args.iter().enumerate() {
                    add_scaled(&mut out, &arg.modulus(lang)?, &decl.modulus.coefficient(i));
                }
                Ok(out)
            }
        }
    }

    fn rename(&self, from: &Var, to: &Var) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(from, to)).collect()),
            other => other.clone(),
        }
    }
}

fn check_args(lang: &MetricLanguage, symbol: &str, expected: &[String], args: &[Term]) -> Result<()> {
    if expected.len() != args.len() {
        return Err(Error::SortMismatch(format!(
            "{symbol} takes {} arguments, got {}",
            expected.len(),
            args.len()
        )));
    }
    for (want, arg) in expected.iter().zip(args) {
        let got = arg.sort(lang)?;
        if &got != want {
            return Err(Error::SortMismatch(format!("{symbol} expects sort {want}, got {got}")));
        }
    }
    Ok(())
}

fn add_scaled(acc: &mut BTreeMap<Var, Rational>, m: &BTreeMap<Var, Rational>, scale: &Rational) {
    for (v, c) in m {
        let e = acc.entry(v.clone()).or_insert_with(Rational::zero);
        *e = &*e + &(c * scale);
    }
}

fn merge_max(a: &BTreeMap<Var, Rational>, b: &BTreeMap<Var, Rational>) -> BTreeMap<Var, Rational> {
    let mut out = a.clone();
    for (v, c) in b {
        let e = out.entry(v.clone()).or_insert_with(Rational::zero);
        if c > e {
            *e = c.clone();
        }
    }
    out
}

/// Formula trees with the 1-Lipschitz connective basis
/// `{max, min, x ∸ q, q ∸ x, midpoint}` and quantifiers `sup`/`inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Rel(String, Vec<Term>),
    Dist(Term, Term),
    Value(Rational),
    Max(Box<Formula>, Box<Formula>),
    Min(Box<Formula>, Box<Formula>),
    /// `φ ∸ q`
    Monus(Box<Formula>, Rational),
    /// `q ∸ φ`
    RevMonus(Rational, Box<Formula>),
    /// `(φ + ψ) / 2`
    Mid(Box<Formula>, Box<Formula>),
    Sup(Var, Box<Formula>),
    Inf(Var, Box<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: Vec<Term>) -> Self {
        Formula::Rel(name.into(), args)
    }
    pub fn dist(a: Term, b: Term) -> Self {
        Formula::Dist(a, b)
    }
    pub fn max(a: Formula, b: Formula) -> Self {
        Formula::Max(Box::new(a), Box::new(b))
    }
    pub fn min(a: Formula, b: Formula) -> Self {
        Formula::Min(Box::new(a), Box::new(b))
    }
    pub fn monus(a: Formula, q: Rational) -> Self {
        Formula::Monus(Box::new(a), q)
    }
    pub fn rev_monus(q: Rational, a: Formula) -> Self {
        Formula::RevMonus(q, Box::new(a))
    }
    pub fn mid(a: Formula, b: Formula) -> Self {
        Formula::Mid(Box::new(a), Box::new(b))
    }
    pub fn sup(v: Var, a: Formula) -> Self {
        Formula::Sup(v, Box::new(a))
    }
    pub fn inf(v: Var, a: Formula) -> Self {
        Formula::Inf(v, Box::new(a))
    }

    /// Quantifier rank.
    pub fn rank(&self) -> u32 {
        match self {
            Formula::Rel(..) | Formula::Dist(..) | Formula::Value(_) => 0,
            Formula::Max(a, b) | Formula::Min(a, b) | Formula::Mid(a, b) => a.rank().max(b.rank()),
            Formula::Monus(a, _) | Formula::RevMonus(_, a) => a.rank(),
            Formula::Sup(_, a) | Formula::Inf(_, a) => a.rank() + 1,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Rel(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Dist(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Value(_) => {}
            Formula::Max(a, b) | Formula::Min(a, b) | Formula::Mid(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Monus(a, _) | Formula::RevMonus(_, a) => a.collect_free(out),
            Formula::Sup(v, a) | Formula::Inf(v, a) => {
                let mut inner = a.free_vars();
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    /// Sort-checks every atom against the language.
    pub fn check(&self, lang: &MetricLanguage) -> Result<()> {
        match self {
            Formula::Rel(r, args) => {
                let decl = lang.relation(r).ok_or_else(|| Error::Unknown { kind: "relation", name: r.clone() })?;
                check_args(lang, r, &decl.args, args)
            }
            Formula::Dist(a, b) => {
                let (sa, sb) = (a.sort(lang)?, b.sort(lang)?);
                if sa != sb {
                    return Err(Error::SortMismatch(format!("d between sorts {sa} and {sb}")));
                }
                Ok(())
            }
            Formula::Value(_) => Ok(()),
            Formula::Max(a, b) | Formula::Min(a, b) | Formula::Mid(a, b) => {
                a.check(lang)?;
                b.check(lang)
            }
            Formula::Monus(a, _) | Formula::RevMonus(_, a) => a.check(lang),
            Formula::Sup(v, a) | Formula::Inf(v, a) => {
                lang.sort_id(&v.sort)?;
                a.check(lang)
            }
        }
    }

    /// Derived modulus over the free variables, computed bottom-up. For
    /// `max`/`min` the coefficientwise maximum is used, an upper bound.
    pub fn modulus_map(&self, lang: &MetricLanguage) -> Result<BTreeMap<Var, Rational>> {
        Ok(match self {
            Formula::Rel(r, args) => {
                let decl = lang.relation(r).ok_or_else(|| Error::Unknown { kind: "relation", name: r.clone() })?;
                let mut out = BTreeMap::new();
                for (i, t) in args.iter().enumerate() {
                    add_scaled(&mut out, &t.modulus(lang)?, &decl.modulus.coefficient(i));
                }
                out
            }
            Formula::Dist(a, b) => {
                let mut out = a.modulus(lang)?;
                add_scaled(&mut out, &b.modulus(lang)?, &Rational::one());
                out
            }
            Formula::Value(_) => BTreeMap::new(),
            Formula::Max(a, b) | Formula::Min(a, b) => merge_max(&a.modulus_map(lang)?, &b.modulus_map(lang)?),
            Formula::Mid(a, b) => {
                let half = Rational::new(1, 2);
                let mut out = BTreeMap::new();
                add_scaled(&mut out, &a.modulus_map(lang)?, &half);
                add_scaled(&mut out, &b.modulus_map(lang)?, &half);
                out
            }
            Formula::Monus(a, _) | Formula::RevMonus(_, a) => a.modulus_map(lang)?,
            Formula::Sup(v, a) | Formula::Inf(v, a) => {
                let mut m = a.modulus_map(lang)?;
                m.remove(v);
                m
            }
        })
    }

    /// Derived modulus laid out along `order` (variables missing from the
    /// formula get coefficient 0).
    pub fn modulus(&self, lang: &MetricLanguage, order: &[Var]) -> Result<LinearModulus> {
        let m = self.modulus_map(lang)?;
        if let Some(v) = m.keys().find(|v| !order.contains(v)) {
            return Err(Error::Unassigned(v.name.clone()));
        }
        Ok(LinearModulus::new(order.iter().map(|v| m.get(v).cloned().unwrap_or_default()).collect()))
    }

    /// Derived value interval.
    pub fn interval(&self, lang: &MetricLanguage) -> Result<(Rational, Rational)> {
        Ok(match self {
            Formula::Rel(r, _) => {
                let decl = lang.relation(r).ok_or_else(|| Error::Unknown { kind: "relation", name: r.clone() })?;
                (decl.interval[0].clone(), decl.interval[1].clone())
            }
            Formula::Dist(a, _) => {
                let s = a.sort(lang)?;
                (Rational::zero(), lang.sorts[lang.sort_id(&s)?].diameter.clone())
            }
            Formula::Value(q) => (q.clone(), q.clone()),
            Formula::Max(a, b) => {
                let ((al, ah), (bl, bh)) = (a.interval(lang)?, b.interval(lang)?);
                (al.max(bl), ah.max(bh))
            }
            Formula::Min(a, b) => {
                let ((al, ah), (bl, bh)) = (a.interval(lang)?, b.interval(lang)?);
                (al.min(bl), ah.min(bh))
            }
            Formula::Mid(a, b) => {
                let ((al, ah), (bl, bh)) = (a.interval(lang)?, b.interval(lang)?);
                (al.midpoint(&bl), ah.midpoint(&bh))
            }
            Formula::Monus(a, q) => {
                let (l, h) = a.interval(lang)?;
                (l.monus(q), h.monus(q))
            }
            Formula::RevMonus(q, a) => {
                let (l, h) = a.interval(lang)?;
                (q.monus(&h), q.monus(&l))
            }
            Formula::Sup(_, a) | Formula::Inf(_, a) => a.interval(lang)?,
        })
    }

    /// Checks that this is an Ω-formula with free variables laid out as
    /// `free`: every quantifier binds a fresh variable of maximal index, and
    /// every subformula's derived modulus over the variables in scope is
    /// dominated by the truncation of `omega` at the scope size.
    pub fn check_omega(&self, lang: &MetricLanguage, omega: &WeakModulus, free: &[Var]) -> Result<()> {
        let mut ctx = free.to_vec();
        self.omega_rec(lang, omega, &mut ctx)
    }

    fn omega_rec(&self, lang: &MetricLanguage, omega: &WeakModulus, ctx: &mut Vec<Var>) -> Result<()> {
        let m = self.modulus(lang, ctx)?;
        if !modulus_dominates(&omega.truncation(ctx.len()), &m) {
            return Err(Error::Invalid(format!("{self} does not respect the weak modulus")));
        }
        match self {
            Formula::Max(a, b) | Formula::Min(a, b) | Formula::Mid(a, b) => {
                a.omega_rec(lang, omega, ctx)?;
                b.omega_rec(lang, omega, ctx)
            }
            Formula::Monus(a, _) | Formula::RevMonus(_, a) => a.omega_rec(lang, omega, ctx),
            Formula::Sup(v, a) | Formula::Inf(v, a) => {
                if ctx.contains(v) {
                    return Err(Error::Invalid(format!("quantifier over {} shadows a variable in scope", v.name)));
                }
                ctx.push(v.clone());
                let r = a.omega_rec(lang, omega, ctx);
                ctx.pop();
                r
            }
            _ => Ok(()),
        }
    }

    /// Renames the bound occurrences of `from` (and only those) to `to`.
    pub fn rename_bound(&self, from: &Var, to: &Var) -> Formula {
        match self {
            Formula::Sup(v, a) if v == from => Formula::sup(to.clone(), a.rename_free(from, to)),
            Formula::Inf(v, a) if v == from => Formula::inf(to.clone(), a.rename_free(from, to)),
            Formula::Sup(v, a) => Formula::sup(v.clone(), a.rename_bound(from, to)),
            Formula::Inf(v, a) => Formula::inf(v.clone(), a.rename_bound(from, to)),
            Formula::Max(a, b) => Formula::max(a.rename_bound(from, to), b.rename_bound(from, to)),
            Formula::Min(a, b) => Formula::min(a.rename_bound(from, to), b.rename_bound(from, to)),
            Formula::Mid(a, b) => Formula::mid(a.rename_bound(from, to), b.rename_bound(from, to)),
            Formula::Monus(a, q) => Formula::monus(a.rename_bound(from, to), q.clone()),
            Formula::RevMonus(q, a) => Formula::rev_monus(q.clone(), a.rename_bound(from, to)),
            atom => atom.clone(),
        }
    }

    fn rename_free(&self, from: &Var, to: &Var) -> Formula {
        match self {
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|t| t.rename(from, to)).collect()),
            Formula::Dist(a, b) => Formula::Dist(a.rename(from, to), b.rename(from, to)),
            Formula::Value(_) => self.clone(),
            Formula::Sup(v, _) | Formula::Inf(v, _) if v == from => self.clone(),
            Formula::Sup(v, a) => Formula::sup(v.clone(), a.rename_free(from, to)),
            Formula::Inf(v, a) => Formula::inf(v.clone(), a.rename_free(from, to)),
            Formula::Max(a, b) => Formula::max(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Min(a, b) => Formula::min(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Mid(a, b) => Formula::mid(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Monus(a, q) => Formula::monus(a.rename_free(from, to), q.clone()),
            Formula::RevMonus(q, a) => Formula::rev_monus(q.clone(), a.rename_free(from, to)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v.name),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Rel(r, args) => write!(f, "{}", Term::App(r.clone(), args.clone())),
            Formula::Dist(a, b) => write!(f, "d({a},{b})"),
            Formula::Value(q) => write!(f, "{q}"),
            Formula::Max(a, b) => write!(f, "max({a}, {b})"),
            Formula::Min(a, b) => write!(f, "min({a}, {b})"),
            Formula::Mid(a, b) => write!(f, "mid({a}, {b})"),
            Formula::Monus(a, q) => write!(f, "({a} ∸ {q})"),
            Formula::RevMonus(q, a) => write!(f, "({q} ∸ {a})"),
            Formula::Sup(v, a) => write!(f, "sup_{} {a}", v.name),
            Formula::Inf(v, a) => write!(f, "inf_{} {a}", v.name),
        }
    }
}
