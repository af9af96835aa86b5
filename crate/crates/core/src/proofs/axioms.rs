use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::category::FiniteCategory;
use super::syntax::{CatSentence, CatTerm, CatVar};
use crate::error::{Error, Result};

pub const MAX_SKELETON_ATOMS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// A member of the theory.
    Theory,
    Tautology,
    EqRefl,
    EqSym,
    EqTrans,
    EqCong,
    ForallInst,
    ExistsIntro,
}

pub const SCHEMES: [Scheme; 8] = [
    Scheme::Theory,
    Scheme::EqRefl,
    Scheme::EqSym,
    Scheme::EqTrans,
    Scheme::EqCong,
    Scheme::ForallInst,
    Scheme::ExistsIntro,
    Scheme::Tautology,
];

impl Scheme {
    pub fn id(self) -> &'static str {
        match self {
            Scheme::Theory => "T",
            Scheme::Tautology => "taut",
            Scheme::EqRefl => "eq-refl",
            Scheme::EqSym => "eq-sym",
            Scheme::EqTrans => "eq-trans",
            Scheme::EqCong => "eq-cong",
            Scheme::ForallInst => "forall-inst",
            Scheme::ExistsIntro => "exists-intro",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SCHEMES.into_iter().find(|k| k.id() == s).ok_or_else(|| Error::Unknown { kind: "axiom scheme", name: s.into() })
    }
}

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The base theory of a presentation: associativity for every quadruple of
/// objects, the two identity laws for every hom-sort, and the composition
/// table as ground equations.
pub fn t0_axioms(cat: &FiniteCategory) -> Vec<CatSentence> {
    let n = cat.object_count();
    let mut out = Vec::new();
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let a = CatVar::new("a", (w, x));
                    let b = CatVar::new("b", (x, y));
                    let c = CatVar::new("c", (y, z));
                    let (ta, tb, tc) = (CatTerm::Var(a.clone()), CatTerm::Var(b.clone()), CatTerm::Var(c.clone()));
                    let left = CatTerm::comp(w, y, z, CatTerm::comp(w, x, y, ta.clone(), tb.clone()), tc.clone());
                    let right = CatTerm::comp(w, x, z, ta, CatTerm::comp(x, y, z, tb, tc));
                    out.push(CatSentence::forall(
                        a,
                        CatSentence::forall(b, CatSentence::forall(c, CatSentence::eq(left, right))),
                    ));
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let a = CatVar::new("a", (x, y));
            let ta = CatTerm::Var(a.clone());
            let ix = CatTerm::Const(cat.identity(x));
            let iy = CatTerm::Const(cat.identity(y));
            out.push(CatSentence::forall(a.clone(), CatSentence::eq(CatTerm::comp(x, x, y, ix, ta.clone()), ta.clone())));
            out.push(CatSentence::forall(a, CatSentence::eq(CatTerm::comp(x, y, y, ta.clone(), iy), ta)));
        }
    }
    for (f, g) in cat.composable_pairs() {
        let h = cat.comp(f, g).expect("composable");
        let (x, y, z) = (cat.source(f), cat.target(f), cat.target(g));
        out.push(CatSentence::eq(CatTerm::comp(x, y, z, CatTerm::Const(f), CatTerm::Const(g)), CatTerm::Const(h)));
    }
    out
}

/// The first scheme `phi` is an instance of, in the order of [`SCHEMES`].
pub fn is_axiom(cat: &FiniteCategory, theory: &[CatSentence], phi: &CatSentence) -> Result<Option<Scheme>> {
    for scheme in SCHEMES {
        if is_instance(cat, theory, phi, scheme)? {
            return Ok(Some(scheme));
        }
    }
    Ok(None)
}

pub fn is_instance(cat: &FiniteCategory, theory: &[CatSentence], phi: &CatSentence, scheme: Scheme) -> Result<bool> {
    use CatSentence::*;
    Ok(match (scheme, phi) {
        (Scheme::Theory, _) => theory.iter().any(|t| t.alpha_eq(phi)),
        (Scheme::EqRefl, Eq(s, t)) => s == t,
        (Scheme::EqSym, Imp(a, b)) => matches!((&**a, &**b), (Eq(t, s), Eq(s2, t2)) if s == s2 && t == t2),
        (Scheme::EqTrans, Imp(a, b)) => match (&**a, &**b) {
            (And(p, q), Eq(t2, u2)) => {
                matches!((&**p, &**q), (Eq(t, s), Eq(s2, u)) if s == s2 && t == t2 && u == u2)
            }
            _ => false,
        },
        (Scheme::EqCong, Imp(a, b)) => match (&**a, &**b) {
            (And(p, q), Eq(CatTerm::Comp(x, y, z, l1, r1), CatTerm::Comp(x2, y2, z2, l2, r2))) => {
                (x, y, z) == (x2, y2, z2)
                    && matches!((&**p, &**q), (Eq(t, t2), Eq(s, s2)) if **l1 == *t && **l2 == *t2 && **r1 == *s && **r2 == *s2)
            }
            _ => false,
        },
        (Scheme::ForallInst, Imp(a, b)) => match &**a {
            Forall(x, body) => is_substitution_instance(cat, body, x, b),
            _ => false,
        },
        (Scheme::ExistsIntro, Imp(a, b)) => match &**b {
            Exists(x, body) => is_substitution_instance(cat, body, x, a),
            _ => false,
        },
        (Scheme::Tautology, _) => is_tautology(phi)?,
        _ => false,
    })
}

/// Whether `target` is `body[t/x]` for some term `t` of the sort of `x`.
fn is_substitution_instance(cat: &FiniteCategory, body: &CatSentence, x: &CatVar, target: &CatSentence) -> bool {
    match find_witness(body, target, x, &mut Vec::new()) {
        Some(t) => t.sort(cat).ok() == Some(x.sort) && body.subst(x, &t).alpha_eq(target),
        None => body.alpha_eq(target),
    }
}

fn find_term(pattern: &CatTerm, target: &CatTerm, x: &CatVar) -> Option<CatTerm> {
    match (pattern, target) {
        (CatTerm::Var(v), _) if v == x => Some(target.clone()),
        (CatTerm::Comp(_, _, _, a, b), CatTerm::Comp(_, _, _, c, d)) => find_term(a, c, x).or_else(|| find_term(b, d, x)),
        _ => None,
    }
}

/// The term standing at the first free occurrence of `x` in `pattern`.
fn find_witness(pattern: &CatSentence, target: &CatSentence, x: &CatVar, bound: &mut Vec<CatVar>) -> Option<CatTerm> {
    use CatSentence::*;
    if bound.contains(x) {
        return None;
    }
    match (pattern, target) {
        (Eq(a, b), Eq(c, d)) => find_term(a, c, x).or_else(|| find_term(b, d, x)),
        (Not(a), Not(b)) => find_witness(a, b, x, bound),
        (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Imp(a, b), Imp(c, d)) => {
            find_witness(a, c, x, bound).or_else(|| find_witness(b, d, x, bound))
        }
        (Forall(v, a), Forall(_, b)) | (Exists(v, a), Exists(_, b)) => {
            bound.push(v.clone());
            let out = find_witness(a, b, x, bound);
            bound.pop();
            out
        }
        _ => None,
    }
}

/// Maximal non-propositional subformulas up to renaming of bound
/// variables, and the skeleton over them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Skeleton {
    Atom(usize),
    Not(Box<Skeleton>),
    And(Box<Skeleton>, Box<Skeleton>),
    Or(Box<Skeleton>, Box<Skeleton>),
    Imp(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    pub fn eval(&self, v: &[bool]) -> bool {
        match self {
            Skeleton::Atom(i) => v[*i],
            Skeleton::Not(a) => !a.eval(v),
            Skeleton::And(a, b) => a.eval(v) && b.eval(v),
            Skeleton::Or(a, b) => a.eval(v) || b.eval(v),
            Skeleton::Imp(a, b) => !a.eval(v) || b.eval(v),
        }
    }
}

pub fn skeleton(phi: &CatSentence) -> (Skeleton, Vec<CatSentence>) {
    fn go(phi: &CatSentence, atoms: &mut Vec<CatSentence>) -> Skeleton {
        let b = |s: Skeleton| Box::new(s);
        match phi {
            CatSentence::Not(a) => Skeleton::Not(b(go(a, atoms))),
            CatSentence::And(a, c) => Skeleton::And(b(go(a, atoms)), b(go(c, atoms))),
            CatSentence::Or(a, c) => Skeleton::Or(b(go(a, atoms)), b(go(c, atoms))),
            CatSentence::Imp(a, c) => Skeleton::Imp(b(go(a, atoms)), b(go(c, atoms))),
            atom => {
                let key = atom.canonical();
                let i = atoms.iter().position(|k| *k == key).unwrap_or_else(|| {
                    atoms.push(key);
                    atoms.len() - 1
                });
                Skeleton::Atom(i)
            }
        }
    }
    let mut atoms = Vec::new();
    let s = go(phi, &mut atoms);
    (s, atoms)
}

/// Truth-table check of the propositional skeleton.
pub fn is_tautology(phi: &CatSentence) -> Result<bool> {
    let (s, atoms) = skeleton(phi);
    let n = atoms.len();
    if n > MAX_SKELETON_ATOMS {
        return Err(Error::SkeletonTooLarge(n));
    }
    let mut v = vec![false; n];
    for bits in 0u32..1 << n {
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = bits >> i & 1 == 1;
        }
        if !s.eval(&v) {
            return Ok(false);
        }
    }
    Ok(true)
}
