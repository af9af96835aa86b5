//! Sentences over the hom-sorts of a finite category, in a parenthesized
//! prefix notation:
//!
//! ```text
//! term    := [f] | (var NAME X Y) | (c X Y Z term term)
//! formula := (= term term) | (not formula) | (and formula formula)
//!          | (or formula formula) | (-> formula formula)
//!          | (forall NAME X Y formula) | (exists NAME X Y formula)
//! ```
//!
//! `X`, `Y`, `Z` are object ids; a variable is its name together with its
//! sort `Mor(X, Y)`. `(c X Y Z s t)` composes `s: Mor(X, Y)` with
//! `t: Mor(Y, Z)`.

use std::collections::BTreeSet;
use std::fmt;

use super::category::FiniteCategory;
use crate::error::{Error, Result};

/// A hom-sort `Mor(x, y)` by object index.
pub type HomSort = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CatVar {
    pub name: String,
    pub sort: HomSort,
}

impl CatVar {
    pub fn new(name: impl Into<String>, sort: HomSort) -> Self {
        CatVar { name: name.into(), sort }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatTerm {
    Var(CatVar),
    /// `[f]`.
    Const(usize),
    /// `c_{x,y,z}(s, t)`.
    Comp(usize, usize, usize, Box<CatTerm>, Box<CatTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatSentence {
    Eq(CatTerm, CatTerm),
    Not(Box<CatSentence>),
    And(Box<CatSentence>, Box<CatSentence>),
    Or(Box<CatSentence>, Box<CatSentence>),
    Imp(Box<CatSentence>, Box<CatSentence>),
    Forall(CatVar, Box<CatSentence>),
    Exists(CatVar, Box<CatSentence>),
}

impl CatTerm {
    pub fn comp(x: usize, y: usize, z: usize, s: CatTerm, t: CatTerm) -> Self {
        CatTerm::Comp(x, y, z, Box::new(s), Box::new(t))
    }

    pub fn sort(&self, cat: &FiniteCategory) -> Result<HomSort> {
        match self {
            CatTerm::Var(v) => Ok(v.sort),
            CatTerm::Const(f) => Ok((cat.source(*f), cat.target(*f))),
            CatTerm::Comp(x, y, z, s, t) => {
                let (ss, ts) = (s.sort(cat)?, t.sort(cat)?);
                if ss != (*x, *y) || ts != (*y, *z) {
                    return Err(Error::SortMismatch(format!("composition {} has ill-sorted arguments", Shown(self, cat))));
                }
                Ok((*x, *z))
            }
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<CatVar>) {
        match self {
            CatTerm::Var(v) => {
                out.insert(v.clone());
            }
            CatTerm::Const(_) => {}
            CatTerm::Comp(_, _, _, s, t) => {
                s.free_vars(out);
                t.free_vars(out);
            }
        }
    }

    fn subst(&self, x: &CatVar, t: &CatTerm) -> CatTerm {
        match self {
            CatTerm::Var(v) if v == x => t.clone(),
            CatTerm::Var(_) | CatTerm::Const(_) => self.clone(),
            CatTerm::Comp(a, b, c, s, u) => CatTerm::comp(*a, *b, *c, s.subst(x, t), u.subst(x, t)),
        }
    }
}

impl CatSentence {
    pub fn eq(s: CatTerm, t: CatTerm) -> Self {
        CatSentence::Eq(s, t)
    }

    pub fn not(a: CatSentence) -> Self {
        CatSentence::Not(Box::new(a))
    }

    pub fn and(a: CatSentence, b: CatSentence) -> Self {
        CatSentence::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: CatSentence, b: CatSentence) -> Self {
        CatSentence::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: CatSentence, b: CatSentence) -> Self {
        CatSentence::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(v: CatVar, a: CatSentence) -> Self {
        CatSentence::Forall(v, Box::new(a))
    }

    pub fn exists(v: CatVar, a: CatSentence) -> Self {
        CatSentence::Exists(v, Box::new(a))
    }

    /// Checks that every composition and equation is sort-correct.
    pub fn check(&self, cat: &FiniteCategory) -> Result<()> {
        match self {
            CatSentence::Eq(s, t) => {
                if s.sort(cat)? != t.sort(cat)? {
                    return Err(Error::SortMismatch(format!("equation {} relates different sorts", Shown(self, cat))));
                }
                Ok(())
            }
            CatSentence::Not(a) | CatSentence::Forall(_, a) | CatSentence::Exists(_, a) => a.check(cat),
            CatSentence::And(a, b) | CatSentence::Or(a, b) | CatSentence::Imp(a, b) => {
                a.check(cat)?;
                b.check(cat)
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<CatVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<CatVar>) {
        match self {
            CatSentence::Eq(s, t) => {
                s.free_vars(out);
                t.free_vars(out);
            }
            CatSentence::Not(a) => a.collect_free(out),
            CatSentence::And(a, b) | CatSentence::Or(a, b) | CatSentence::Imp(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            CatSentence::Forall(v, a) | CatSentence::Exists(v, a) => {
                let mut inner = BTreeSet::new();
                a.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_free(&self, v: &CatVar) -> bool {
        self.free_vars().contains(v)
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        let term = |t: &CatTerm, out: &mut BTreeSet<String>| {
            let mut vs = BTreeSet::new();
            t.free_vars(&mut vs);
            out.extend(vs.into_iter().map(|v| v.name));
        };
        match self {
            CatSentence::Eq(s, t) => {
                term(s, out);
                term(t, out);
            }
            CatSentence::Not(a) => a.all_names(out),
            CatSentence::And(a, b) | CatSentence::Or(a, b) | CatSentence::Imp(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            CatSentence::Forall(v, a) | CatSentence::Exists(v, a) => {
                out.insert(v.name.clone());
                a.all_names(out);
            }
        }
    }

    /// `self[t/x]`, renaming bound variables that would capture a free
    /// variable of `t`.
    pub fn subst(&self, x: &CatVar, t: &CatTerm) -> CatSentence {
        let mut tv = BTreeSet::new();
        t.free_vars(&mut tv);
        self.subst_with(x, t, &tv)
    }

    fn subst_with(&self, x: &CatVar, t: &CatTerm, tv: &BTreeSet<CatVar>) -> CatSentence {
        match self {
            CatSentence::Eq(a, b) => CatSentence::Eq(a.subst(x, t), b.subst(x, t)),
            CatSentence::Not(a) => CatSentence::not(a.subst_with(x, t, tv)),
            CatSentence::And(a, b) => CatSentence::and(a.subst_with(x, t, tv), b.subst_with(x, t, tv)),
            CatSentence::Or(a, b) => CatSentence::or(a.subst_with(x, t, tv), b.subst_with(x, t, tv)),
            CatSentence::Imp(a, b) => CatSentence::imp(a.subst_with(x, t, tv), b.subst_with(x, t, tv)),
            CatSentence::Forall(v, a) | CatSentence::Exists(v, a) => {
                let rebuild = |v: CatVar, a: CatSentence| match self {
                    CatSentence::Forall(..) => CatSentence::forall(v, a),
                    _ => CatSentence::exists(v, a),
                };
                if v == x || !a.is_free(x) {
                    return self.clone();
                }
                if tv.contains(v) {
                    let mut names = BTreeSet::new();
                    a.all_names(&mut names);
                    names.extend(tv.iter().map(|w| w.name.clone()));
                    names.insert(x.name.clone());
                    let mut fresh = format!("{}'", v.name);
                    while names.contains(&fresh) {
                        fresh.push('\'');
                    }
                    let w = CatVar::new(fresh, v.sort);
                    let renamed = a.subst(v, &CatTerm::Var(w.clone()));
                    return rebuild(w, renamed.subst_with(x, t, tv));
                }
                rebuild(v.clone(), a.subst_with(x, t, tv))
            }
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &CatSentence) -> bool {
        alpha_eq_in(self, other, &mut Vec::new())
    }

    /// A representative of the alpha-equivalence class, with bound
    /// variables renamed by binding depth.
    pub fn canonical(&self) -> CatSentence {
        self.canonical_at(0)
    }

    fn canonical_at(&self, depth: usize) -> CatSentence {
        match self {
            CatSentence::Eq(..) => self.clone(),
            CatSentence::Not(a) => CatSentence::not(a.canonical_at(depth)),
            CatSentence::And(a, b) => CatSentence::and(a.canonical_at(depth), b.canonical_at(depth)),
            CatSentence::Or(a, b) => CatSentence::or(a.canonical_at(depth), b.canonical_at(depth)),
            CatSentence::Imp(a, b) => CatSentence::imp(a.canonical_at(depth), b.canonical_at(depth)),
            CatSentence::Forall(v, a) | CatSentence::Exists(v, a) => {
                let w = CatVar::new(format!("#{depth}"), v.sort);
                let body = a.subst(v, &CatTerm::Var(w.clone())).canonical_at(depth + 1);
                match self {
                    CatSentence::Forall(..) => CatSentence::forall(w, body),
                    _ => CatSentence::exists(w, body),
                }
            }
        }
    }

    pub fn display<'a>(&'a self, cat: &'a FiniteCategory) -> impl fmt::Display + 'a {
        Shown(self, cat)
    }
}

fn term_alpha_eq(s: &CatTerm, t: &CatTerm, env: &[(CatVar, CatVar)]) -> bool {
    match (s, t) {
        (CatTerm::Var(a), CatTerm::Var(b)) => {
            let la = env.iter().rposition(|(x, _)| x == a);
            let lb = env.iter().rposition(|(_, y)| y == b);
            match (la, lb) {
                (Some(i), Some(j)) => i == j,
                (None, None) => a == b,
                _ => false,
            }
        }
        (CatTerm::Const(f), CatTerm::Const(g)) => f == g,
        (CatTerm::Comp(a, b, c, s1, t1), CatTerm::Comp(x, y, z, s2, t2)) => {
            (a, b, c) == (x, y, z) && term_alpha_eq(s1, s2, env) && term_alpha_eq(t1, t2, env)
        }
        _ => false,
    }
}

fn alpha_eq_in(p: &CatSentence, q: &CatSentence, env: &mut Vec<(CatVar, CatVar)>) -> bool {
    use CatSentence::*;
    match (p, q) {
        (Eq(a, b), Eq(c, d)) => term_alpha_eq(a, c, env) && term_alpha_eq(b, d, env),
        (Not(a), Not(b)) => alpha_eq_in(a, b, env),
        (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Imp(a, b), Imp(c, d)) => {
            alpha_eq_in(a, c, env) && alpha_eq_in(b, d, env)
        }
        (Forall(v, a), Forall(w, b)) | (Exists(v, a), Exists(w, b)) => {
            if v.sort != w.sort {
                return false;
            }
            env.push((v.clone(), w.clone()));
            let ok = alpha_eq_in(a, b, env);
            env.pop();
            ok
        }
        _ => false,
    }
}

struct Shown<'a, T>(&'a T, &'a FiniteCategory);

impl fmt::Display for Shown<'_, CatTerm> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cat = self.1;
        let o = |i: usize| &cat.objects()[i];
        match self.0 {
            CatTerm::Var(v) => write!(f, "(var {} {} {})", v.name, o(v.sort.0), o(v.sort.1)),
            CatTerm::Const(m) => write!(f, "[{}]", cat.morphism_id(*m)),
            CatTerm::Comp(x, y, z, s, t) => {
                write!(f, "(c {} {} {} {} {})", o(*x), o(*y), o(*z), Shown(&**s, cat), Shown(&**t, cat))
            }
        }
    }
}

impl fmt::Display for Shown<'_, CatSentence> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cat = self.1;
        let o = |i: usize| &cat.objects()[i];
        match self.0 {
            CatSentence::Eq(s, t) => write!(f, "(= {} {})", Shown(s, cat), Shown(t, cat)),
            CatSentence::Not(a) => write!(f, "(not {})", Shown(&**a, cat)),
            CatSentence::And(a, b) => write!(f, "(and {} {})", Shown(&**a, cat), Shown(&**b, cat)),
            CatSentence::Or(a, b) => write!(f, "(or {} {})", Shown(&**a, cat), Shown(&**b, cat)),
            CatSentence::Imp(a, b) => write!(f, "(-> {} {})", Shown(&**a, cat), Shown(&**b, cat)),
            CatSentence::Forall(v, a) | CatSentence::Exists(v, a) => {
                let q = if matches!(self.0, CatSentence::Forall(..)) { "forall" } else { "exists" };
                write!(f, "({q} {} {} {} {})", v.name, o(v.sort.0), o(v.sort.1), Shown(&**a, cat))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                    None => return Err(Error::Parse("unbalanced parentheses".into())),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected ')'".into())),
        atom => Ok(Sexp::Atom(atom.to_string())),
    }
}

fn atom(s: &Sexp) -> Result<&str> {
    match s {
        Sexp::Atom(a) => Ok(a),
        Sexp::List(_) => Err(Error::Parse("expected a name".into())),
    }
}

fn parse_term(s: &Sexp, cat: &FiniteCategory) -> Result<CatTerm> {
    match s {
        Sexp::Atom(a) => match a.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            Some(f) => Ok(CatTerm::Const(cat.morphism(f)?)),
            None => Err(Error::Parse(format!("expected a term, found {a:?}"))),
        },
        Sexp::List(items) => match items.first().map(atom).transpose()? {
            Some("var") if items.len() == 4 => {
                Ok(CatTerm::Var(CatVar::new(atom(&items[1])?, (cat.object(atom(&items[2])?)?, cat.object(atom(&items[3])?)?))))
            }
            Some("c") if items.len() == 6 => Ok(CatTerm::comp(
                cat.object(atom(&items[1])?)?,
                cat.object(atom(&items[2])?)?,
                cat.object(atom(&items[3])?)?,
                parse_term(&items[4], cat)?,
                parse_term(&items[5], cat)?,
            )),
            _ => Err(Error::Parse("malformed term".into())),
        },
    }
}

fn parse_formula(s: &Sexp, cat: &FiniteCategory) -> Result<CatSentence> {
    let Sexp::List(items) = s else {
        return Err(Error::Parse(format!("expected a formula, found {s:?}")));
    };
    let head = items.first().map(atom).transpose()?.ok_or_else(|| Error::Parse("empty formula".into()))?;
    let sub = |i: usize| parse_formula(&items[i], cat);
    let arity = |n: usize| -> Result<()> {
        if items.len() == n + 1 {
            Ok(())
        } else {
            Err(Error::Parse(format!("{head} takes {n} arguments")))
        }
    };
    match head {
        "=" => {
            arity(2)?;
            Ok(CatSentence::eq(parse_term(&items[1], cat)?, parse_term(&items[2], cat)?))
        }
        "not" => {
            arity(1)?;
            Ok(CatSentence::not(sub(1)?))
        }
        "and" | "or" | "->" => {
            arity(2)?;
            let (a, b) = (sub(1)?, sub(2)?);
            Ok(match head {
                "and" => CatSentence::and(a, b),
                "or" => CatSentence::or(a, b),
                _ => CatSentence::imp(a, b),
            })
        }
        "forall" | "exists" => {
            arity(4)?;
            let v = CatVar::new(atom(&items[1])?, (cat.object(atom(&items[2])?)?, cat.object(atom(&items[3])?)?));
            let body = sub(4)?;
            Ok(if head == "forall" { CatSentence::forall(v, body) } else { CatSentence::exists(v, body) })
        }
        other => Err(Error::Parse(format!("unknown connective {other:?}"))),
    }
}

/// Parses and sort-checks a formula.
pub fn parse_sentence(text: &str, cat: &FiniteCategory) -> Result<CatSentence> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let s = read(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse("trailing input after formula".into()));
    }
    let f = parse_formula(&s, cat)?;
    f.check(cat)?;
    Ok(f)
}
