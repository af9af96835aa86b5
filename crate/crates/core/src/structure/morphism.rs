//! Metric homomorphisms and their distance-matrix encoding.

use serde::{Deserialize, Serialize};

use super::FiniteStructure;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A sort-preserving total map, one target index per source element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementMap {
    pub maps: Vec<Vec<usize>>,
}

impl ElementMap {
    pub fn identity(s: &FiniteStructure) -> Self {
        ElementMap { maps: (0..s.sort_count()).map(|i| (0..s.size(i)).collect()).collect() }
    }

    pub fn apply(&self, sort: usize, a: usize) -> usize {
        self.maps[sort][a]
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &ElementMap) -> ElementMap {
        ElementMap {
            maps: self
                .maps
                .iter()
                .zip(&other.maps)
                .map(|(f, g)| f.iter().map(|&a| g[a]).collect())
                .collect(),
        }
    }

    /// Every sort-preserving map from `src` to `tgt`.
    pub fn all(src: &FiniteStructure, tgt: &FiniteStructure) -> Vec<ElementMap> {
        let mut out = vec![ElementMap { maps: Vec::new() }];
        for sort in 0..src.sort_count() {
            let fns = src_functions(src.size(sort), tgt.size(sort));
            out = out
                .into_iter()
                .flat_map(|m| {
                    fns.iter().map(move |f| {
                        let mut m = m.clone();
                        m.maps.push(f.clone());
                        m
                    })
                })
                .collect();
        }
        out
    }

    fn check_shape(&self, src: &FiniteStructure, tgt: &FiniteStructure) -> std::result::Result<(), String> {
        if self.maps.len() != src.sort_count() {
            return Err(format!("map covers {} sorts, structure has {}", self.maps.len(), src.sort_count()));
        }
        for (sort, f) in self.maps.iter().enumerate() {
            if f.len() != src.size(sort) {
                return Err(format!("map is not total on sort {}", src.language().sorts[sort].name));
            }
            if let Some(a) = f.iter().position(|&b| b >= tgt.size(sort)) {
                return Err(format!("{} is mapped outside the target", src.universe(sort)[a]));
            }
        }
        Ok(())
    }
}

fn src_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..m).map(move |b| {
                    let mut f = f.clone();
                    f.push(b);
                    f
                })
            })
            .collect();
    }
    out
}

/// Checks the homomorphism conditions, returning the first violation.
pub fn check_homomorphism(src: &FiniteStructure, tgt: &FiniteStructure, m: &ElementMap) -> std::result::Result<(), String> {
    if src.language() != tgt.language() {
        return Err("structures have different languages".into());
    }
    m.check_shape(src, tgt)?;
    let lang = src.language();
    for (c, decl) in lang.constants.iter().enumerate() {
        let sort = lang.sort_index(&decl.sort).expect("validated");
        if m.apply(sort, src.constant_value(c)) != tgt.constant_value(c) {
            return Err(format!("constant {} is not preserved", decl.name));
        }
    }
    let image = |sorts: &[usize], t: &[usize]| -> Vec<usize> {
        sorts.iter().zip(t).map(|(&s, &a)| m.apply(s, a)).collect()
    };
    for (f, decl) in lang.functions.iter().enumerate() {
        let sorts = src.arg_sorts(&decl.args);
        let result = lang.sort_index(&decl.result).expect("validated");
        for t in src.tuples(&sorts) {
            if m.apply(result, src.function_value(f, &t)) != tgt.function_value(f, &image(&sorts, &t)) {
                return Err(format!("function {} does not commute at ({})", decl.name, ids(src, &sorts, &t)));
            }
        }
    }
    for (r, decl) in lang.relations.iter().enumerate() {
        let sorts = src.arg_sorts(&decl.args);
        for t in src.tuples(&sorts) {
            if tgt.relation_value(r, &image(&sorts, &t)).abs() > src.relation_value(r, &t).abs() {
                return Err(format!("relation {} increases at ({})", decl.name, ids(src, &sorts, &t)));
            }
        }
    }
    for sort in 0..src.sort_count() {
        for a in 0..src.size(sort) {
            for b in 0..src.size(sort) {
                if tgt.dist(sort, m.apply(sort, a), m.apply(sort, b)) > src.dist(sort, a, b) {
                    return Err(format!("metric increases at ({},{})", src.universe(sort)[a], src.universe(sort)[b]));
                }
            }
        }
    }
    Ok(())
}

pub fn is_homomorphism(src: &FiniteStructure, tgt: &FiniteStructure, m: &ElementMap) -> bool {
    check_homomorphism(src, tgt, m).is_ok()
}

fn ids(s: &FiniteStructure, sorts: &[usize], t: &[usize]) -> String {
    sorts.iter().zip(t).map(|(&so, &a)| s.universe(so)[a].as_str()).collect::<Vec<_>>().join(",")
}

/// Per sort, the table `δ(a, b) = d(f(a), b)` of a map `f`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismMatrix {
    pub source_sizes: Vec<usize>,
    pub target_sizes: Vec<usize>,
    pub tables: Vec<Vec<Rational>>,
}

impl MorphismMatrix {
    pub fn entry(&self, sort: usize, a: usize, b: usize) -> &Rational {
        &self.tables[sort][a * self.target_sizes[sort] + b]
    }

    /// Recovers the encoded map from the zero of each row.
    pub fn decode(&self) -> Result<ElementMap> {
        let mut maps = Vec::new();
        for sort in 0..self.tables.len() {
            let mut f = Vec::new();
            for a in 0..self.source_sizes[sort] {
                let zeros: Vec<_> = (0..self.target_sizes[sort]).filter(|&b| self.entry(sort, a, b).is_zero()).collect();
                match zeros.as_slice() {
                    [b] => f.push(*b),
                    [] => return Err(Error::Invalid(format!("row {a} of sort {sort} has no zero"))),
                    _ => return Err(Error::Invalid(format!("row {a} of sort {sort} has several zeros"))),
                }
            }
            maps.push(f);
        }
        Ok(ElementMap { maps })
    }
}

pub fn encode_morphism(src: &FiniteStructure, tgt: &FiniteStructure, m: &ElementMap) -> MorphismMatrix {
    let sorts = 0..src.sort_count();
    MorphismMatrix {
        source_sizes: sorts.clone().map(|s| src.size(s)).collect(),
        target_sizes: sorts.clone().map(|s| tgt.size(s)).collect(),
        tables: sorts
            .map(|s| {
                (0..src.size(s))
                    .flat_map(|a| (0..tgt.size(s)).map(move |b| (a, b)))
                    .map(|(a, b)| tgt.dist(s, m.apply(s, a), b).clone())
                    .collect()
            })
            .collect(),
    }
}

/// `τ(a, c) = μ(b₀, c)` where `b₀` is the zero of the row `ρ(a, ·)`.
pub fn compose_matrices(rho: &MorphismMatrix, mu: &MorphismMatrix) -> Result<MorphismMatrix> {
    if rho.target_sizes != mu.source_sizes {
        return Err(Error::Invalid("matrices are not composable".into()));
    }
    let f = rho.decode()?;
    let tables = (0..rho.tables.len())
        .map(|s| {
            (0..rho.source_sizes[s])
                .flat_map(|a| (0..mu.target_sizes[s]).map(move |c| (a, c)))
                .map(|(a, c)| mu.entry(s, f.apply(s, a), c).clone())
                .collect()
        })
        .collect();
    Ok(MorphismMatrix { source_sizes: rho.source_sizes.clone(), target_sizes: mu.target_sizes.clone(), tables })
}
