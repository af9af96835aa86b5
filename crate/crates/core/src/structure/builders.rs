//! Small structures over the built-in languages.

use std::sync::Arc;

use super::FiniteStructure;
use crate::lang::{fixture, MetricLanguage};
use crate::rational::Rational;

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn lang(name: &str) -> Arc<MetricLanguage> {
    Arc::new(fixture(name).expect("built-in fixture"))
}

/// A finite metric space over the `metric` language from a square table.
pub fn metric_space(table: &[Vec<Rational>], prefix: &str) -> FiniteStructure {
    let n = table.len();
    let flat = table.iter().flat_map(|row| row.iter().cloned()).collect();
    FiniteStructure::new(lang("metric"), vec![ids(prefix, n)], vec![flat], vec![], vec![], vec![])
        .expect("square table")
}

/// The two-point space with the given distance.
pub fn two_point(d: Rational, prefix: &str) -> FiniteStructure {
    metric_space(&[vec![Rational::zero(), d.clone()], vec![d, Rational::zero()]], prefix)
}

/// An `n`-point structure over a discrete fixture language (`graph` or
/// `chain`) whose relation holds (value 0) exactly where `holds` says.
pub fn discrete(language: &str, n: usize, prefix: &str, holds: impl Fn(usize, usize) -> bool) -> FiniteStructure {
    let metric = (0..n * n)
        .map(|k| if k / n == k % n { Rational::zero() } else { Rational::one() })
        .collect();
    let rel = (0..n * n)
        .map(|k| if holds(k / n, k % n) { Rational::zero() } else { Rational::one() })
        .collect();
    FiniteStructure::new(lang(language), vec![ids(prefix, n)], vec![metric], vec![rel], vec![], vec![])
        .expect("discrete tables")
}

/// An undirected graph on `n` vertices.
pub fn graph(n: usize, edges: &[(usize, usize)], prefix: &str) -> FiniteStructure {
    discrete("graph", n, prefix, |a, b| edges.iter().any(|&(u, v)| (u, v) == (a, b) || (v, u) == (a, b)))
}

/// The linear order with `n` elements, `le(i, j)` holding iff `i ≤ j`.
pub fn chain(n: usize, prefix: &str) -> FiniteStructure {
    discrete("chain", n, prefix, |a, b| a <= b)
}
