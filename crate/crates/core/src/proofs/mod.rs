//! A Hilbert-style proof checker for first-order theories over finite
//! category presentations.

mod axioms;
mod category;
mod syntax;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use axioms::{is_axiom, is_instance, is_tautology, skeleton, t0_axioms, Scheme, Skeleton, MAX_SKELETON_ATOMS, SCHEMES};
pub use category::{FiniteCategory, MorphismDecl};
pub use syntax::{parse_sentence, CatSentence, CatTerm, CatVar, HomSort};

/// How a proof line is justified. Indices are 1-based and must point to
/// earlier lines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Justification {
    Axiom { scheme: Scheme },
    /// From `minor` and `major = (minor → φ)`, infer `φ`.
    ModusPonens { minor: usize, major: usize },
    /// From `α → β`, infer `α → ∀x β`.
    GenForall { from: usize },
    /// From `β → α`, infer `∃x β → α`.
    GenExists { from: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: CatSentence,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProofSequence {
    pub lines: Vec<ProofLine>,
}

#[derive(Serialize, Deserialize)]
struct WireLine {
    formula: String,
    #[serde(flatten)]
    justification: Justification,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireProof {
    lines: Vec<WireLine>,
}

impl ProofSequence {
    pub fn push(&mut self, formula: CatSentence, justification: Justification) {
        self.lines.push(ProofLine { formula, justification });
    }

    pub fn last(&self) -> Option<&CatSentence> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Parses a proof file:
    /// `{"lines": [{"formula": "(= [f] [f])", "rule": "axiom", "scheme": "eq-refl"},
    /// {"formula": ..., "rule": "modus-ponens", "minor": 1, "major": 2}, ...]}`.
    pub fn from_json(text: &str, cat: &FiniteCategory) -> Result<Self> {
        let wire: WireProof = serde_json::from_str(text)?;
        let mut proof = ProofSequence::default();
        for (i, l) in wire.lines.into_iter().enumerate() {
            let formula = parse_sentence(&l.formula, cat).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            proof.push(formula, l.justification);
        }
        Ok(proof)
    }

    pub fn load(path: impl AsRef<Path>, cat: &FiniteCategory) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, cat)
    }

    pub fn to_json(&self, cat: &FiniteCategory) -> String {
        let wire = WireProof {
            lines: self
                .lines
                .iter()
                .map(|l| WireLine { formula: l.formula.display(cat).to_string(), justification: l.justification.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("proof serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofVerdict {
    pub valid: bool,
    /// 1-based index of the first invalid line.
    pub invalid_at: Option<usize>,
    pub reason: Option<String>,
}

impl ProofVerdict {
    fn ok() -> Self {
        ProofVerdict { valid: true, invalid_at: None, reason: None }
    }

    fn fail(at: usize, reason: impl Into<String>) -> Self {
        ProofVerdict { valid: false, invalid_at: Some(at), reason: Some(reason.into()) }
    }
}

/// Validates each line against its justification.
pub fn check_proof(cat: &FiniteCategory, theory: &[CatSentence], proof: &ProofSequence) -> ProofVerdict {
    let lines = &proof.lines;
    for (i, line) in lines.iter().enumerate() {
        let n = i + 1;
        if let Err(e) = line.formula.check(cat) {
            return ProofVerdict::fail(n, e.to_string());
        }
        let earlier = |j: usize| -> std::result::Result<&CatSentence, String> {
            if j >= 1 && j < n {
                Ok(&lines[j - 1].formula)
            } else {
                Err(format!("line {j} is not an earlier line"))
            }
        };
        let outcome: std::result::Result<(), String> = (|| match &line.justification {
            Justification::Axiom { scheme } => match is_instance(cat, theory, &line.formula, *scheme) {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!("not an instance of scheme {scheme}")),
                Err(e) => Err(e.to_string()),
            },
            Justification::ModusPonens { minor, major } => {
                let (a, b) = (earlier(*minor)?, earlier(*major)?);
                match b {
                    CatSentence::Imp(ante, cons) if ante.alpha_eq(a) => {
                        if cons.alpha_eq(&line.formula) {
                            Ok(())
                        } else {
                            Err("conclusion is not the consequent of the major premise".into())
                        }
                    }
                    _ => Err("major premise is not an implication with minor as antecedent".into()),
                }
            }
            Justification::GenForall { from } => match (earlier(*from)?, &line.formula) {
                (CatSentence::Imp(a, b), CatSentence::Imp(a2, q)) => match &**q {
                    CatSentence::Forall(x, b2) if a.alpha_eq(a2) && b.alpha_eq(b2) => {
                        if a.is_free(x) {
                            Err(format!("{} is free in the antecedent", x.name))
                        } else {
                            Ok(())
                        }
                    }
                    _ => Err("conclusion is not the premise with its consequent generalized".into()),
                },
                _ => Err("premise and conclusion must be implications".into()),
            },
            Justification::GenExists { from } => match (earlier(*from)?, &line.formula) {
                (CatSentence::Imp(b, a), CatSentence::Imp(q, a2)) => match &**q {
                    CatSentence::Exists(x, b2) if a.alpha_eq(a2) && b.alpha_eq(b2) => {
                        if a.is_free(x) {
                            Err(format!("{} is free in the consequent", x.name))
                        } else {
                            Ok(())
                        }
                    }
                    _ => Err("conclusion is not the premise with its antecedent generalized".into()),
                },
                _ => Err("premise and conclusion must be implications".into()),
            },
        })();
        if let Err(reason) = outcome {
            return ProofVerdict::fail(n, reason);
        }
    }
    ProofVerdict::ok()
}

const ALPHA: &str = "alpha";
const BETA: &str = "beta";

fn goal_body(x: usize, y: usize, s: CatTerm, t: CatTerm, cat: &FiniteCategory) -> CatSentence {
    CatSentence::and(
        CatSentence::eq(CatTerm::comp(y, x, y, t.clone(), s.clone()), CatTerm::Const(cat.identity(y))),
        CatSentence::eq(CatTerm::comp(x, y, x, s, t), CatTerm::Const(cat.identity(x))),
    )
}

/// `∃α:Mor(x,y) ∃β:Mor(y,x) (α∘β = [i(y)] ∧ β∘α = [i(x)])`, with `α∘β`
/// written `c_{y,x,y}(β, α)`.
pub fn equivalence_goal(cat: &FiniteCategory, x: &str, y: &str) -> Result<CatSentence> {
    let (x, y) = (cat.object(x)?, cat.object(y)?);
    Ok(goal_for(cat, x, y))
}

fn goal_for(cat: &FiniteCategory, x: usize, y: usize) -> CatSentence {
    let a = CatVar::new(ALPHA, (x, y));
    let b = CatVar::new(BETA, (y, x));
    let body = goal_body(x, y, CatTerm::Var(a.clone()), CatTerm::Var(b.clone()), cat);
    CatSentence::exists(a, CatSentence::exists(b, body))
}

/// A fixed nine-line proof of the equivalence goal from mutually inverse
/// `f: x → y` and `g: y → x`, if the presentation has them.
pub fn synthesize_equivalence_proof(cat: &FiniteCategory, x: &str, y: &str) -> Result<Option<ProofSequence>> {
    let (x, y) = (cat.object(x)?, cat.object(y)?);
    let (ix, iy) = (cat.identity(x), cat.identity(y));
    let pair = cat.hom(x, y).into_iter().find_map(|f| {
        cat.hom(y, x).into_iter().find(|&g| cat.comp(f, g) == Some(ix) && cat.comp(g, f) == Some(iy)).map(|g| (f, g))
    });
    let Some((f, g)) = pair else {
        return Ok(None);
    };
    let (cf, cg) = (CatTerm::Const(f), CatTerm::Const(g));
    let b = CatVar::new(BETA, (y, x));
    let ground = goal_body(x, y, cf.clone(), cg.clone(), cat);
    let (left, right) = match &ground {
        CatSentence::And(l, r) => ((**l).clone(), (**r).clone()),
        _ => unreachable!(),
    };
    let half = CatSentence::exists(b.clone(), goal_body(x, y, cf.clone(), CatTerm::Var(b), cat));
    let goal = goal_for(cat, x, y);
    let axiom = |scheme| Justification::Axiom { scheme };
    let mp = |minor, major| Justification::ModusPonens { minor, major };
    let mut p = ProofSequence::default();
    p.push(right.clone(), axiom(Scheme::Theory));
    p.push(left.clone(), axiom(Scheme::Theory));
    let intro = CatSentence::imp(left.clone(), CatSentence::imp(right.clone(), ground.clone()));
    p.push(intro, axiom(Scheme::Tautology));
    p.push(CatSentence::imp(right, ground.clone()), mp(2, 3));
    p.push(ground.clone(), mp(1, 4));
    p.push(CatSentence::imp(ground, half.clone()), axiom(Scheme::ExistsIntro));
    p.push(half.clone(), mp(5, 6));
    p.push(CatSentence::imp(half, goal.clone()), axiom(Scheme::ExistsIntro));
    p.push(goal, mp(7, 8));
    Ok(Some(p))
}

/// Truth of a closed sentence in the presentation, with `Mor(x, y)`
/// interpreted as the hom-set.
pub fn eval_sentence(cat: &FiniteCategory, phi: &CatSentence) -> Result<bool> {
    phi.check(cat)?;
    if let Some(v) = phi.free_vars().into_iter().next() {
        return Err(Error::Unassigned(v.name));
    }
    let mut env = BTreeMap::new();
    Ok(eval_in(cat, phi, &mut env))
}

fn eval_term(cat: &FiniteCategory, t: &CatTerm, env: &BTreeMap<CatVar, usize>) -> usize {
    match t {
        CatTerm::Var(v) => env[v],
        CatTerm::Const(f) => *f,
        CatTerm::Comp(_, _, _, s, u) => cat.comp(eval_term(cat, s, env), eval_term(cat, u, env)).expect("sort-correct"),
    }
}

fn eval_in(cat: &FiniteCategory, phi: &CatSentence, env: &mut BTreeMap<CatVar, usize>) -> bool {
    match phi {
        CatSentence::Eq(s, t) => eval_term(cat, s, env) == eval_term(cat, t, env),
        CatSentence::Not(a) => !eval_in(cat, a, env),
        CatSentence::And(a, b) => eval_in(cat, a, env) && eval_in(cat, b, env),
        CatSentence::Or(a, b) => eval_in(cat, a, env) || eval_in(cat, b, env),
        CatSentence::Imp(a, b) => !eval_in(cat, a, env) || eval_in(cat, b, env),
        CatSentence::Forall(v, a) | CatSentence::Exists(v, a) => {
            let universal = matches!(phi, CatSentence::Forall(..));
            let saved = env.get(v).copied();
            let mut result = universal;
            for m in cat.hom(v.sort.0, v.sort.1) {
                env.insert(v.clone(), m);
                if eval_in(cat, a, env) != universal {
                    result = !universal;
                    break;
                }
            }
            match saved {
                Some(m) => env.insert(v.clone(), m),
                None => env.remove(v),
            };
            result
        }
    }
}
