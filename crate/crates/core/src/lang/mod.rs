//! Metric languages: sorts with diameters, relation and function symbols with
//! value intervals and linear moduli, and constants.

mod fixtures;
mod formula;
mod modulus;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::report::ValidationReport;

pub use fixtures::{fixture, FIXTURE_NAMES};
pub use formula::{Formula, Term, Var};
pub use modulus::{
    modulus_dominates, multiset_admissible, omega_truncate, LinearModulus, TailRule, WeakModulus,
};

/// Name of the distinguished metric predicate, present implicitly on every sort.
pub const METRIC_SYMBOL: &str = "d";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortDecl {
    pub name: String,
    pub diameter: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationDecl {
    pub name: String,
    pub args: Vec<String>,
    pub interval: [Rational; 2],
    pub modulus: LinearModulus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDecl {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
    pub modulus: LinearModulus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantDecl {
    pub name: String,
    pub sort: String,
}

/// A metric signature. Every sort carries an implicit metric predicate `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MetricLanguage {
    pub sorts: Vec<SortDecl>,
    #[serde(default)]
    pub relations: Vec<RelationDecl>,
    #[serde(default)]
    pub functions: Vec<FunctionDecl>,
    #[serde(default)]
    pub constants: Vec<ConstantDecl>,
}

impl MetricLanguage {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("language serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s.name == name)
    }

    pub fn sort_id(&self, name: &str) -> Result<usize> {
        self.sort_index(name).ok_or_else(|| Error::Unknown { kind: "sort", name: name.into() })
    }

    pub fn relation(&self, name: &str) -> Option<&RelationDecl> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&ConstantDecl> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn is_function_free(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        validate_language(self)
    }
}

pub fn validate_language(lang: &MetricLanguage) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut sort_names = BTreeSet::new();
    if lang.sorts.is_empty() {
        report.push("language declares no sorts");
    }
    for s in &lang.sorts {
        if !sort_names.insert(s.name.as_str()) {
            report.push(format!("duplicate sort {}", s.name));
        }
        if !s.diameter.is_positive() {
            report.push(format!("sort {}: diameter must be positive", s.name));
        }
    }
    let check_sort = |report: &mut ValidationReport, owner: &str, sort: &str| {
        if !sort_names.contains(sort) {
            report.push(format!("unknown sort {sort} (in {owner})"));
        }
    };

    let mut symbols = BTreeSet::new();
    let mut claim = |report: &mut ValidationReport, name: &str| {
        if name == METRIC_SYMBOL {
            report.push(format!("symbol name {name} is reserved for the metric"));
        } else if !symbols.insert(name.to_string()) {
            report.push(format!("duplicate symbol {name}"));
        }
    };

    for r in &lang.relations {
        claim(&mut report, &r.name);
        for a in &r.args {
            check_sort(&mut report, &format!("relation {}", r.name), a);
        }
        if r.interval[0] > r.interval[1] {
            report.push(format!("relation {}: empty interval [{}, {}]", r.name, r.interval[0], r.interval[1]));
        }
        check_modulus(&mut report, &format!("relation {}", r.name), &r.modulus, r.args.len());
    }
    for f in &lang.functions {
        claim(&mut report, &f.name);
        for a in &f.args {
            check_sort(&mut report, &format!("function {}", f.name), a);
        }
        check_sort(&mut report, &format!("function {}", f.name), &f.result);
        check_modulus(&mut report, &format!("function {}", f.name), &f.modulus, f.args.len());
    }
    for c in &lang.constants {
        claim(&mut report, &c.name);
        check_sort(&mut report, &format!("constant {}", c.name), &c.sort);
    }
    report
}

fn check_modulus(report: &mut ValidationReport, owner: &str, m: &LinearModulus, arity: usize) {
    if m.arity() != arity {
        report.push(format!("{owner}: modulus has {} coefficients for arity {arity}", m.arity()));
    }
    if !m.is_nonnegative() {
        report.push(format!("{owner}: modulus coefficients must be non-negative"));
    }
}
