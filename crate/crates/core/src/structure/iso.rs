//! Isomorphism search by backtracking.

use super::{ElementMap, FiniteStructure};

/// Finds a bijection preserving every table exactly, if one exists.
pub fn find_isomorphism(s: &FiniteStructure, t: &FiniteStructure) -> Option<ElementMap> {
    if s.language() != t.language() || (0..s.sort_count()).any(|i| s.size(i) != t.size(i)) {
        return None;
    }
    let mut maps: Vec<Vec<usize>> = (0..s.sort_count()).map(|_| Vec::new()).collect();
    let mut used: Vec<Vec<bool>> = (0..t.sort_count()).map(|i| vec![false; t.size(i)]).collect();
    search(s, t, 0, &mut maps, &mut used).then(|| ElementMap { maps })
}

fn search(s: &FiniteStructure, t: &FiniteStructure, sort: usize, maps: &mut Vec<Vec<usize>>, used: &mut Vec<Vec<bool>>) -> bool {
    if sort == s.sort_count() {
        return preserves_tables(s, t, &ElementMap { maps: maps.clone() });
    }
    let a = maps[sort].len();
    if a == s.size(sort) {
        return search(s, t, sort + 1, maps, used);
    }
    for b in 0..t.size(sort) {
        if used[sort][b] {
            continue;
        }
        let consistent = (0..a).all(|x| s.dist(sort, x, a) == t.dist(sort, maps[sort][x], b))
            && s.dist(sort, a, a) == t.dist(sort, b, b);
        if !consistent {
            continue;
        }
        used[sort][b] = true;
        maps[sort].push(b);
        if search(s, t, sort, maps, used) {
            return true;
        }
        maps[sort].pop();
        used[sort][b] = false;
    }
    false
}

fn preserves_tables(s: &FiniteStructure, t: &FiniteStructure, m: &ElementMap) -> bool {
    let lang = s.language();
    let image = |sorts: &[usize], tuple: &[usize]| -> Vec<usize> {
        sorts.iter().zip(tuple).map(|(&so, &a)| m.apply(so, a)).collect()
    };
    let constants = lang.constants.iter().enumerate().all(|(c, decl)| {
        m.apply(lang.sort_index(&decl.sort).expect("validated"), s.constant_value(c)) == t.constant_value(c)
    });
    let relations = lang.relations.iter().enumerate().all(|(r, decl)| {
        let sorts = s.arg_sorts(&decl.args);
        s.tuples(&sorts).iter().all(|tu| s.relation_value(r, tu) == t.relation_value(r, &image(&sorts, tu)))
    });
    let functions = lang.functions.iter().enumerate().all(|(f, decl)| {
        let sorts = s.arg_sorts(&decl.args);
        let result = lang.sort_index(&decl.result).expect("validated");
        s.tuples(&sorts)
            .iter()
            .all(|tu| m.apply(result, s.function_value(f, tu)) == t.function_value(f, &image(&sorts, tu)))
    });
    constants && relations && functions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::structure::{chain, discrete, two_point};

    #[test]
    fn examples() {
        let s = two_point(Rational::one(), "a");
        assert!(find_isomorphism(&s, &s).is_some());
        assert!(find_isomorphism(&s, &two_point(Rational::new(3, 2), "b")).is_none());
        // The 3-chain listed as c3 < c1 < c2.
        let perm = [2usize, 0, 1];
        let relabeled = discrete("chain", 3, "c", |a, b| perm[a] <= perm[b]);
        let m = find_isomorphism(&chain(3, "c"), &relabeled).unwrap();
        assert_eq!(m.maps[0], vec![1, 2, 0]);
    }
}
