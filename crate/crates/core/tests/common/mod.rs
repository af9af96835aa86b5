//! Test-side oracles and structure pools, written against the raw
//! structure tables only.

#![allow(dead_code)]

use std::collections::HashMap;

use efd_core::lang::{multiset_admissible, WeakModulus};
use efd_core::structure::{chain, graph, metric_space, two_point, FiniteStructure};
use efd_core::Rational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// One pledged round: sort, element of A, element of B.
pub type RawPair = (usize, usize, usize);

pub fn metric3(d12: Rational, d13: Rational, d23: Rational, prefix: &str) -> FiniteStructure {
    let z = Rational::zero();
    metric_space(
        &[vec![z.clone(), d12.clone(), d13.clone()], vec![d12, z.clone(), d23.clone()], vec![d13, d23, z]],
        prefix,
    )
}

pub fn point(prefix: &str) -> FiniteStructure {
    metric_space(&[vec![Rational::zero()]], prefix)
}

/// Small structures per fixture language, at most three points each.
pub fn pool() -> Vec<Vec<(String, FiniteStructure)>> {
    let metric = vec![
        ("pt".to_string(), point("m")),
        ("d1/2".into(), two_point(q(1, 2), "m")),
        ("d1".into(), two_point(q(1, 1), "m")),
        ("d3/2".into(), two_point(q(3, 2), "m")),
        ("eq1".into(), metric3(q(1, 1), q(1, 1), q(1, 1), "m")),
        ("iso112".into(), metric3(q(1, 1), q(1, 1), q(2, 1), "m")),
        ("sc".into(), metric3(q(1, 2), q(1, 1), q(3, 2), "m")),
        ("iso1 3/2".into(), metric3(q(1, 1), q(3, 2), q(3, 2), "m")),
    ];
    let graphs = vec![
        ("K1".to_string(), graph(1, &[], "v")),
        ("E2".into(), graph(2, &[], "v")),
        ("K2".into(), graph(2, &[(0, 1)], "v")),
        ("E3".into(), graph(3, &[], "v")),
        ("K2+K1".into(), graph(3, &[(0, 1)], "v")),
        ("P3".into(), graph(3, &[(0, 1), (1, 2)], "v")),
        ("K3".into(), graph(3, &[(0, 1), (1, 2), (0, 2)], "v")),
    ];
    let chains = (1..=3).map(|n| (format!("C{n}"), chain(n, "c"))).collect();
    vec![metric, graphs, chains]
}

/// Ordered pairs of pool structures sharing a language.
pub fn pool_pairs() -> Vec<(String, FiniteStructure, FiniteStructure)> {
    let mut out = Vec::new();
    for family in pool() {
        for (na, a) in &family {
            for (nb, b) in &family {
                out.push((format!("{na} vs {nb}"), a.clone(), b.clone()));
            }
        }
    }
    out
}

fn relation_gap(s: &FiniteStructure, t: &FiniteStructure, rel: usize, ta: &[usize], tb: &[usize]) -> Rational {
    s.relation_value(rel, ta).dist(t.relation_value(rel, tb))
}

/// The quantifier-free sup on raw tuples of a function-free, constant-free
/// pair: every atom `R(x_i1, …, x_ik)` whose coefficient bag fits under Ω.
pub fn raw_r0(a: &FiniteStructure, b: &FiniteStructure, omega: &WeakModulus, t: &[RawPair]) -> Rational {
    let lang = a.language();
    assert!(lang.functions.is_empty() && lang.constants.is_empty(), "oracle is for relational pools");
    let mut best = Rational::zero();
    let n = t.len();
    let mut consider = |sorts: &[usize], coeffs: &[Rational], value: &mut dyn FnMut(&[usize], &[usize]) -> Rational| {
        if !multiset_admissible(omega, coeffs) {
            return;
        }
        let k = sorts.len();
        let mut idx = vec![0usize; k];
        loop {
            if idx.iter().zip(sorts).all(|(&i, &s)| t[i].0 == s) {
                let ta: Vec<usize> = idx.iter().map(|&i| t[i].1).collect();
                let tb: Vec<usize> = idx.iter().map(|&i| t[i].2).collect();
                let g = value(&ta, &tb);
                if g > best {
                    best = g;
                }
            }
            let mut j = 0;
            loop {
                if j == k {
                    return;
                }
                idx[j] += 1;
                if idx[j] < n {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    };
    if n == 0 {
        return best;
    }
    for (r, decl) in lang.relations.iter().enumerate() {
        let sorts: Vec<usize> = decl.args.iter().map(|s| lang.sort_index(s).unwrap()).collect();
        consider(&sorts, &decl.modulus.coefficients, &mut |ta, tb| relation_gap(a, b, r, ta, tb));
    }
    for s in 0..a.sort_count() {
        consider(&[s, s], &[Rational::one(), Rational::one()], &mut |ta, tb| {
            a.dist(s, ta[0], ta[1]).dist(b.dist(s, tb[0], tb[1]))
        });
    }
    best
}

fn challenges(a: &FiniteStructure, b: &FiniteStructure) -> Vec<(bool, usize, usize)> {
    let mut out = Vec::new();
    for s in 0..a.sort_count() {
        out.extend((0..a.size(s)).map(|e| (true, s, e)));
        out.extend((0..b.size(s)).map(|e| (false, s, e)));
    }
    out
}

fn responses(a: &FiniteStructure, b: &FiniteStructure, ch: (bool, usize, usize)) -> Vec<RawPair> {
    let (in_a, s, e) = ch;
    if in_a {
        (0..b.size(s)).map(|d| (s, e, d)).collect()
    } else {
        (0..a.size(s)).map(|d| (s, d, e)).collect()
    }
}

/// Backward induction over raw move sequences:
/// `max(r0, max over challenges of min over responses of the value one
/// round shorter)`.
pub fn raw_minimax(a: &FiniteStructure, b: &FiniteStructure, omega: &WeakModulus, k: u64, t: &mut Vec<RawPair>) -> Rational {
    let mut best = raw_r0(a, b, omega, t);
    if k == 0 {
        return best;
    }
    for ch in challenges(a, b) {
        let mut worst: Option<Rational> = None;
        for p in responses(a, b, ch) {
            t.push(p);
            let v = raw_minimax(a, b, omega, k - 1, t);
            t.pop();
            if worst.as_ref().is_none_or(|w| v < *w) {
                worst = Some(v);
            }
        }
        let worst = worst.expect("non-empty universes");
        if worst > best {
            best = worst;
        }
    }
    best
}

/// Whether II survives a game with `k` clock steps left, I choosing any
/// smaller clock each round and II needing `r0 < ε` after every round.
pub fn raw_game_ii_wins(
    a: &FiniteStructure,
    b: &FiniteStructure,
    omega: &WeakModulus,
    eps: &Rational,
    k: u64,
    t: &mut Vec<RawPair>,
) -> bool {
    if raw_r0(a, b, omega, t) >= *eps {
        return false;
    }
    for j in 0..k {
        for ch in challenges(a, b) {
            let mut answered = false;
            for p in responses(a, b, ch) {
                t.push(p);
                let ok = raw_game_ii_wins(a, b, omega, eps, j, t);
                t.pop();
                if ok {
                    answered = true;
                    break;
                }
            }
            if !answered {
                return false;
            }
        }
    }
    true
}

fn key(t: &[RawPair]) -> Vec<RawPair> {
    let mut v = t.to_vec();
    v.sort();
    v.dedup();
    v
}

/// II survives `depth` more rounds of an endless game, memoized on the set
/// of pledged pairs.
pub fn survives(
    a: &FiniteStructure,
    b: &FiniteStructure,
    omega: &WeakModulus,
    eps: &Rational,
    depth: u64,
    t: &mut Vec<RawPair>,
    memo: &mut HashMap<(u64, Vec<RawPair>), bool>,
) -> bool {
    let k = (depth, key(t));
    if let Some(&v) = memo.get(&k) {
        return v;
    }
    let mut ok = raw_r0(a, b, omega, t) < *eps;
    if ok && depth > 0 {
        'c: for ch in challenges(a, b) {
            for p in responses(a, b, ch) {
                t.push(p);
                let s = survives(a, b, omega, eps, depth - 1, t, memo);
                t.pop();
                if s {
                    continue 'c;
                }
            }
            ok = false;
            break;
        }
    }
    memo.insert(k, ok);
    ok
}

/// `raw_game_ii_wins` memoized on the set of pledged pairs, for the larger
/// chain instances.
pub fn game_ii_wins_memo(
    a: &FiniteStructure,
    b: &FiniteStructure,
    omega: &WeakModulus,
    eps: &Rational,
    k: u64,
    t: &mut Vec<RawPair>,
    memo: &mut HashMap<(u64, Vec<RawPair>), bool>,
) -> bool {
    let mk = (k, key(t));
    if let Some(&v) = memo.get(&mk) {
        return v;
    }
    let mut ok = raw_r0(a, b, omega, t) < *eps;
    'rounds: for j in 0..k {
        if !ok {
            break;
        }
        for ch in challenges(a, b) {
            let mut answered = false;
            for p in responses(a, b, ch) {
                t.push(p);
                let w = game_ii_wins_memo(a, b, omega, eps, j, t, memo);
                t.pop();
                if w {
                    answered = true;
                    break;
                }
            }
            if !answered {
                ok = false;
                break 'rounds;
            }
        }
    }
    memo.insert(mk, ok);
    ok
}

/// The classical answer for `k`-round games on finite linear orders.
pub fn chains_equivalent(a: u64, b: u64, k: u32) -> bool {
    let bound = (1u64 << k) - 1;
    a == b || (a >= bound && b >= bound)
}
