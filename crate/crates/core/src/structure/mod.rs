//! Finite metric structures.

mod builders;
mod eval;
mod io;
mod iso;
mod morphism;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lang::MetricLanguage;
use crate::rational::Rational;
use crate::report::ValidationReport;

pub use builders::{chain, discrete, graph, metric_space, two_point};
pub use eval::{eval_formula, eval_term, Assignment};
pub use iso::find_isomorphism;
pub use morphism::{
    check_homomorphism, compose_matrices, encode_morphism, is_homomorphism, ElementMap, MorphismMatrix,
};

/// A reference to an element: sort index and position in that sort's universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem {
    pub sort: usize,
    pub index: usize,
}

/// A finite L-structure. Tables are shape-checked at construction; the
/// metric axioms, intervals and moduli are checked by [`validate_structure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    language: Arc<MetricLanguage>,
    universes: Vec<Vec<String>>,
    metric: Vec<Vec<Rational>>,
    relations: Vec<Vec<Rational>>,
    functions: Vec<Vec<usize>>,
    constants: Vec<usize>,
}

impl FiniteStructure {
    /// Builds a structure from flat row-major tables indexed in the
    /// language's declaration order.
    pub fn new(
        language: Arc<MetricLanguage>,
        universes: Vec<Vec<String>>,
        metric: Vec<Vec<Rational>>,
        relations: Vec<Vec<Rational>>,
        functions: Vec<Vec<usize>>,
        constants: Vec<usize>,
    ) -> Result<Self> {
        let lang = &*language;
        let shape = |what: String, expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{what}: expected {expected} entries, got {got}")))
            }
        };
        shape("universes".into(), lang.sorts.len(), universes.len())?;
        shape("metric tables".into(), lang.sorts.len(), metric.len())?;
        for (s, table) in metric.iter().enumerate() {
            let n = universes[s].len();
            shape(format!("metric of sort {}", lang.sorts[s].name), n * n, table.len())?;
        }
        let size_of = |sort: &str| lang.sort_index(sort).map(|s| universes[s].len());
        let dims = |args: &[String]| -> Result<usize> {
            args.iter().try_fold(1usize, |acc, a| {
                size_of(a)
                    .map(|n| acc * n)
                    .ok_or_else(|| Error::Unknown { kind: "sort", name: a.clone() })
            })
        };
        shape("relation tables".into(), lang.relations.len(), relations.len())?;
        for (decl, table) in lang.relations.iter().zip(&relations) {
            shape(format!("relation {}", decl.name), dims(&decl.args)?, table.len())?;
        }
        shape("function tables".into(), lang.functions.len(), functions.len())?;
        for (decl, table) in lang.functions.iter().zip(&functions) {
            shape(format!("function {}", decl.name), dims(&decl.args)?, table.len())?;
            let n = size_of(&decl.result).ok_or_else(|| Error::Unknown { kind: "sort", name: decl.result.clone() })?;
            if table.iter().any(|&e| e >= n) {
                return Err(Error::Invalid(format!("function {} maps outside its result sort", decl.name)));
            }
        }
        shape("constants".into(), lang.constants.len(), constants.len())?;
        for (decl, &c) in lang.constants.iter().zip(&constants) {
            let n = size_of(&decl.sort).ok_or_else(|| Error::Unknown { kind: "sort", name: decl.sort.clone() })?;
            if c >= n {
                return Err(Error::Invalid(format!("constant {} is outside its sort", decl.name)));
            }
        }
        Ok(FiniteStructure { language, universes, metric, relations, functions, constants })
    }

    pub fn language(&self) -> &MetricLanguage {
        &self.language
    }

    pub fn language_arc(&self) -> &Arc<MetricLanguage> {
        &self.language
    }

    pub fn sort_count(&self) -> usize {
        self.universes.len()
    }

    pub fn size(&self, sort: usize) -> usize {
        self.universes[sort].len()
    }

    pub fn universe(&self, sort: usize) -> &[String] {
        &self.universes[sort]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.universes
            .iter()
            .enumerate()
            .flat_map(|(sort, u)| (0..u.len()).map(move |index| Elem { sort, index }))
    }

    pub fn elem_id(&self, e: Elem) -> &str {
        &self.universes[e.sort][e.index]
    }

    /// Looks up an element by its id.
    pub fn find(&self, id: &str) -> Option<Elem> {
        self.universes.iter().enumerate().find_map(|(sort, u)| {
            u.iter().position(|x| x == id).map(|index| Elem { sort, index })
        })
    }

    pub fn dist(&self, sort: usize, a: usize, b: usize) -> &Rational {
        &self.metric[sort][a * self.universes[sort].len() + b]
    }

    pub fn metric_table(&self, sort: usize) -> &[Rational] {
        &self.metric[sort]
    }

    fn flat_index(&self, args: &[String], tuple: &[usize]) -> usize {
        let mut idx = 0;
        for (a, &t) in args.iter().zip(tuple) {
            let n = self.universes[self.language.sort_index(a).expect("checked at construction")].len();
            idx = idx * n + t;
        }
        idx
    }

    pub fn relation_value(&self, rel: usize, tuple: &[usize]) -> &Rational {
        let decl = &self.language.relations[rel];
        &self.relations[rel][self.flat_index(&decl.args, tuple)]
    }

    pub fn relation_table(&self, rel: usize) -> &[Rational] {
        &self.relations[rel]
    }

    pub fn function_value(&self, func: usize, tuple: &[usize]) -> usize {
        let decl = &self.language.functions[func];
        self.functions[func][self.flat_index(&decl.args, tuple)]
    }

    pub fn function_table(&self, func: usize) -> &[usize] {
        &self.functions[func]
    }

    pub fn constant_value(&self, c: usize) -> usize {
        self.constants[c]
    }

    /// Sort indices of a symbol's argument list.
    pub fn arg_sorts(&self, args: &[String]) -> Vec<usize> {
        args.iter().map(|a| self.language.sort_index(a).expect("checked")).collect()
    }

    /// Every tuple over the given sorts, in row-major order.
    pub fn tuples(&self, sorts: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &s in sorts {
            let n = self.universes[s].len();
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..n).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        validate_structure(self)
    }
}

/// Checks the metric axioms, diameters, relation intervals and moduli.
///
/// Modulus checks compare every pair of argument tuples, so the cost is
/// quadratic in the table size: fine up to about six points per sort.
pub fn validate_structure(s: &FiniteStructure) -> ValidationReport {
    let lang = s.language();
    let mut report = lang.validate();
    if !report.is_ok() {
        return report;
    }
    let mut seen = std::collections::BTreeSet::new();
    for (sort, decl) in lang.sorts.iter().enumerate() {
        let ids = s.universe(sort);
        if ids.is_empty() {
            report.push(format!("empty universe for sort {}", decl.name));
        }
        for id in ids {
            if !seen.insert(id.as_str()) {
                report.push(format!("duplicate element id {id}"));
            }
        }
        report.extend(check_metric(s, sort));
    }
    for (r, decl) in lang.relations.iter().enumerate() {
        let sorts = s.arg_sorts(&decl.args);
        let tuples = s.tuples(&sorts);
        let [lo, hi] = &decl.interval;
        for t in &tuples {
            let v = s.relation_value(r, t);
            if v < lo || v > hi {
                report.push(format!(
                    "interval violation: {}({}) = {v} outside [{lo}, {hi}]",
                    decl.name,
                    ids(s, &sorts, t)
                ));
            }
        }
        'outer: for t in &tuples {
            for u in &tuples {
                let bound = modulus_bound(s, &sorts, &decl.modulus.coefficients, t, u);
                if s.relation_value(r, t).dist(s.relation_value(r, u)) > bound {
                    report.push(format!(
                        "modulus violation: {} at ({}) vs ({})",
                        decl.name,
                        ids(s, &sorts, t),
                        ids(s, &sorts, u)
                    ));
                    break 'outer;
                }
            }
        }
    }
    for (f, decl) in lang.functions.iter().enumerate() {
        let sorts = s.arg_sorts(&decl.args);
        let result = lang.sort_index(&decl.result).expect("validated");
        let tuples = s.tuples(&sorts);
        'outer: for t in &tuples {
            for u in &tuples {
                let bound = modulus_bound(s, &sorts, &decl.modulus.coefficients, t, u);
                if s.dist(result, s.function_value(f, t), s.function_value(f, u)) > &bound {
                    report.push(format!(
                        "modulus violation: {} at ({}) vs ({})",
                        decl.name,
                        ids(s, &sorts, t),
                        ids(s, &sorts, u)
                    ));
                    break 'outer;
                }
            }
        }
    }
    report
}

fn modulus_bound(s: &FiniteStructure, sorts: &[usize], coeffs: &[Rational], t: &[usize], u: &[usize]) -> Rational {
    sorts
        .iter()
        .zip(coeffs)
        .zip(t.iter().zip(u))
        .map(|((&sort, c), (&a, &b))| c * s.dist(sort, a, b))
        .sum()
}

fn ids(s: &FiniteStructure, sorts: &[usize], t: &[usize]) -> String {
    sorts
        .iter()
        .zip(t)
        .map(|(&sort, &i)| s.universe(sort)[i].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn check_metric(s: &FiniteStructure, sort: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = s.size(sort);
    let id = |i: usize| s.universe(sort)[i].as_str();
    let diameter = &s.language().sorts[sort].diameter;
    for a in 0..n {
        if !s.dist(sort, a, a).is_zero() {
            report.push(format!("identity at ({},{})", id(a), id(a)));
        }
        for b in 0..n {
            let d = s.dist(sort, a, b);
            if a < b && d != s.dist(sort, b, a) {
                report.push(format!("symmetry at ({},{})", id(a), id(b)));
            }
            if a != b && !d.is_positive() {
                report.push(format!("identity of indiscernibles at ({},{})", id(a), id(b)));
            }
            if a < b && d > diameter {
                report.push(format!("diameter exceeded at ({},{})", id(a), id(b)));
            }
            for c in 0..n {
                if s.dist(sort, a, c) > &(d + s.dist(sort, b, c)) {
                    report.push(format!("triangle inequality at ({},{},{})", id(a), id(b), id(c)));
                }
            }
        }
    }
    report
}
