use proptest::prelude::*;

use efd_core::proofs::{
    check_proof, eval_sentence, is_axiom, is_tautology, parse_sentence, synthesize_equivalence_proof, t0_axioms, CatSentence,
    CatTerm, FiniteCategory, Justification, ProofSequence, Scheme,
};

fn categories() -> Vec<FiniteCategory> {
    vec![FiniteCategory::terminal(), FiniteCategory::groupoid(), FiniteCategory::discrete_two()]
}

fn next(choices: &[usize], at: &mut usize) -> usize {
    *at += 1;
    choices[(*at - 1) % choices.len()]
}

/// A ground term of sort `Mor(x, y)`, built from constants and composites.
fn ground_term(cat: &FiniteCategory, x: usize, y: usize, choices: &[usize], at: &mut usize) -> CatTerm {
    let constant = |at: &mut usize| {
        let hom = cat.hom(x, y);
        CatTerm::Const(hom[next(choices, at) % hom.len()])
    };
    if next(choices, at) % 3 != 0 || *at > 6 {
        return constant(at);
    }
    let mid = next(choices, at) % cat.object_count();
    if cat.hom(x, mid).is_empty() || cat.hom(mid, y).is_empty() {
        return constant(at);
    }
    let s = ground_term(cat, x, mid, choices, at);
    let t = ground_term(cat, mid, y, choices, at);
    CatTerm::comp(x, mid, y, s, t)
}

#[derive(Clone, Debug)]
enum Prop {
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Imp(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn holds(&self, v: u32) -> bool {
        match self {
            Prop::Atom(i) => v >> i & 1 == 1,
            Prop::Not(a) => !a.holds(v),
            Prop::And(a, b) => a.holds(v) && b.holds(v),
            Prop::Or(a, b) => a.holds(v) || b.holds(v),
            Prop::Imp(a, b) => !a.holds(v) || b.holds(v),
        }
    }

    fn sentence(&self, atoms: &[CatSentence]) -> CatSentence {
        match self {
            Prop::Atom(i) => atoms[*i].clone(),
            Prop::Not(a) => CatSentence::not(a.sentence(atoms)),
            Prop::And(a, b) => CatSentence::and(a.sentence(atoms), b.sentence(atoms)),
            Prop::Or(a, b) => CatSentence::or(a.sentence(atoms), b.sentence(atoms)),
            Prop::Imp(a, b) => CatSentence::imp(a.sentence(atoms), b.sentence(atoms)),
        }
    }
}

fn prop() -> impl Strategy<Value = Prop> {
    (0usize..3).prop_map(Prop::Atom).prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Prop::Not(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Prop::Imp(Box::new(a), Box::new(b))),
        ]
    })
}

proptest! {
    #[test]
    fn tautologies_match_truth_tables(p in prop()) {
        let g = FiniteCategory::groupoid();
        let atoms: Vec<CatSentence> = ["(= [f] [f])", "(= (c x y x [f] [g]) [ix])", "(forall a x y (= (var a x y) [f]))"]
            .iter()
            .map(|s| parse_sentence(s, &g).unwrap())
            .collect();
        prop_assert_eq!(is_tautology(&p.sentence(&atoms)).unwrap(), (0..8u32).all(|v| p.holds(v)));
    }

    #[test]
    fn universal_instances_are_axioms_and_true(c in 0usize..3, which in any::<usize>(), choices in prop::collection::vec(any::<usize>(), 1..16)) {
        let cat = &categories()[c];
        let theory = t0_axioms(cat);
        let universal: Vec<_> = theory.iter().filter(|a| matches!(a, CatSentence::Forall(v, _) if !cat.hom(v.sort.0, v.sort.1).is_empty()))
            .collect();
        let phi = universal[which % universal.len()];
        let CatSentence::Forall(v, body) = phi else { unreachable!() };
        let t = ground_term(cat, v.sort.0, v.sort.1, &choices, &mut 0);
        let instance = CatSentence::imp(phi.clone(), body.subst(v, &t));
        prop_assert_eq!(is_axiom(cat, &theory, &instance).unwrap(), Some(Scheme::ForallInst));
        prop_assert!(eval_sentence(cat, &instance).unwrap());
        prop_assert!(eval_sentence(cat, &body.subst(v, &t)).unwrap());
    }

    #[test]
    fn theory_axioms_hold_and_print_faithfully(c in 0usize..3) {
        let cat = &categories()[c];
        for phi in t0_axioms(cat) {
            prop_assert!(eval_sentence(cat, &phi).unwrap());
            let back = parse_sentence(&phi.display(cat).to_string(), cat).unwrap();
            prop_assert!(back.alpha_eq(&phi));
        }
    }

    #[test]
    fn reflexivity_on_ground_terms(c in 0usize..3, x in 0usize..2, y in 0usize..2, choices in prop::collection::vec(any::<usize>(), 1..16)) {
        let cat = &categories()[c];
        let (x, y) = (x % cat.object_count(), y % cat.object_count());
        prop_assume!(!cat.hom(x, y).is_empty());
        let t = ground_term(cat, x, y, &choices, &mut 0);
        let refl = CatSentence::eq(t.clone(), t);
        let mut proof = ProofSequence::default();
        proof.push(refl, Justification::Axiom { scheme: Scheme::EqRefl });
        prop_assert!(check_proof(cat, &t0_axioms(cat), &proof).valid);
    }
}

#[test]
fn synthesized_proofs_survive_json() {
    let cat = FiniteCategory::groupoid();
    let proof = synthesize_equivalence_proof(&cat, "y", "x").unwrap().unwrap();
    let back = ProofSequence::from_json(&proof.to_json(&cat), &cat).unwrap();
    assert!(check_proof(&cat, &t0_axioms(&cat), &back).valid);
    assert!(synthesize_equivalence_proof(&FiniteCategory::discrete_two(), "x", "y").unwrap().is_none());
}
