//! Finite category presentations.
//!
//! ```json
//! {"objects": ["x", "y"],
//!  "morphisms": [{"id": "f", "source": "x", "target": "y"}, ...],
//!  "identities": {"x": "ix", "y": "iy"},
//!  "composition": [["f", "g", "ix"], ...]}
//! ```
//!
//! A composition entry `[f, g, h]` reads `c(f, g) = h` for `f: x → y` and
//! `g: y → z`; the table must cover every composable pair.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::ValidationReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    objects: Vec<String>,
    morphisms: Vec<MorphismDecl>,
    identities: BTreeMap<String, String>,
    composition: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<(String, usize, usize)>,
    identities: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
}

impl FiniteCategory {
    /// Builds and validates a presentation from named parts.
    pub fn new(
        objects: &[&str],
        morphisms: &[(&str, &str, &str)],
        identities: &[(&str, &str)],
        composition: &[(&str, &str, &str)],
    ) -> Result<Self> {
        Self::from_wire(Wire {
            objects: objects.iter().map(|s| s.to_string()).collect(),
            morphisms: morphisms
                .iter()
                .map(|(id, s, t)| MorphismDecl { id: id.to_string(), source: s.to_string(), target: t.to_string() })
                .collect(),
            identities: identities.iter().map(|(x, i)| (x.to_string(), i.to_string())).collect(),
            composition: composition.iter().map(|(f, g, h)| [f.to_string(), g.to_string(), h.to_string()]).collect(),
        })
    }

    fn from_wire(w: Wire) -> Result<Self> {
        let bad = |m: String| Error::Invalid(m);
        let mut obj_ix = HashMap::new();
        for (i, o) in w.objects.iter().enumerate() {
            if obj_ix.insert(o.clone(), i).is_some() {
                return Err(bad(format!("duplicate object {o}")));
            }
        }
        let obj = |name: &str| obj_ix.get(name).copied().ok_or_else(|| Error::Unknown { kind: "object", name: name.into() });
        let mut mor_ix = HashMap::new();
        let mut morphisms = Vec::new();
        for m in &w.morphisms {
            if mor_ix.insert(m.id.clone(), morphisms.len()).is_some() {
                return Err(bad(format!("duplicate morphism {}", m.id)));
            }
            morphisms.push((m.id.clone(), obj(&m.source)?, obj(&m.target)?));
        }
        let mor = |name: &str| mor_ix.get(name).copied().ok_or_else(|| Error::Unknown { kind: "morphism", name: name.into() });
        let mut identities = Vec::new();
        for o in &w.objects {
            let id = w.identities.get(o).ok_or_else(|| bad(format!("object {o} has no identity")))?;
            identities.push(mor(id)?);
        }
        for k in w.identities.keys() {
            obj(k)?;
        }
        let mut compose = HashMap::new();
        for [f, g, h] in &w.composition {
            if compose.insert((mor(f)?, mor(g)?), mor(h)?).is_some() {
                return Err(bad(format!("composition of {f} and {g} given twice")));
            }
        }
        let cat = FiniteCategory { objects: w.objects, morphisms, identities, compose };
        let report = cat.validate();
        if !report.is_ok() {
            return Err(bad(report.defects.join("; ")));
        }
        Ok(cat)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_wire(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut composition: Vec<[String; 3]> = self
            .compose
            .iter()
            .map(|(&(f, g), &h)| [self.morphism_id(f).into(), self.morphism_id(g).into(), self.morphism_id(h).into()])
            .collect();
        composition.sort();
        let w = Wire {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|(id, s, t)| MorphismDecl { id: id.clone(), source: self.objects[*s].clone(), target: self.objects[*t].clone() })
                .collect(),
            identities: self
                .objects
                .iter()
                .zip(&self.identities)
                .map(|(o, &i)| (o.clone(), self.morphism_id(i).to_string()))
                .collect(),
            composition,
        };
        serde_json::to_string_pretty(&w).expect("category serializes")
    }

    /// Composability, typing, totality, identity and associativity laws.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.morphisms.len();
        for (x, &i) in self.identities.iter().enumerate() {
            if (self.source(i), self.target(i)) != (x, x) {
                report.push(format!("identity {} of {} is not an endomorphism of it", self.morphism_id(i), self.objects[x]));
            }
        }
        for (&(f, g), &h) in &self.compose {
            if self.target(f) != self.source(g) {
                report.push(format!("composition of non-composable {} and {}", self.morphism_id(f), self.morphism_id(g)));
            } else if (self.source(h), self.target(h)) != (self.source(f), self.target(g)) {
                report.push(format!("c({}, {}) = {} has the wrong type", self.morphism_id(f), self.morphism_id(g), self.morphism_id(h)));
            }
        }
        for f in 0..n {
            for g in 0..n {
                if self.target(f) == self.source(g) && !self.compose.contains_key(&(f, g)) {
                    report.push(format!("composition of {} and {} is missing", self.morphism_id(f), self.morphism_id(g)));
                }
            }
        }
        if !report.is_ok() {
            return report;
        }
        for f in 0..n {
            let (x, y) = (self.source(f), self.target(f));
            if self.comp(self.identities[x], f) != Some(f) || self.comp(f, self.identities[y]) != Some(f) {
                report.push(format!("identities are not neutral for {}", self.morphism_id(f)));
            }
        }
        for f in 0..n {
            for g in self.outgoing(self.target(f)) {
                for h in self.outgoing(self.target(g)) {
                    let left = self.comp(self.comp(f, g).expect("total"), h);
                    let right = self.comp(f, self.comp(g, h).expect("total"));
                    if left != right {
                        report.push(format!(
                            "composition is not associative at ({}, {}, {})",
                            self.morphism_id(f),
                            self.morphism_id(g),
                            self.morphism_id(h)
                        ));
                    }
                }
            }
        }
        report
    }

    fn outgoing(&self, x: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&g| self.source(g) == x).collect()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object(&self, name: &str) -> Result<usize> {
        self.objects.iter().position(|o| o == name).ok_or_else(|| Error::Unknown { kind: "object", name: name.into() })
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphism(&self, name: &str) -> Result<usize> {
        self.morphisms
            .iter()
            .position(|m| m.0 == name)
            .ok_or_else(|| Error::Unknown { kind: "morphism", name: name.into() })
    }

    pub fn morphism_id(&self, f: usize) -> &str {
        &self.morphisms[f].0
    }

    pub fn source(&self, f: usize) -> usize {
        self.morphisms[f].1
    }

    pub fn target(&self, f: usize) -> usize {
        self.morphisms[f].2
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    /// `c(f, g)`: first `f`, then `g`.
    pub fn comp(&self, f: usize, g: usize) -> Option<usize> {
        self.compose.get(&(f, g)).copied()
    }

    /// The morphisms of the hom-set `Mor(x, y)`.
    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&f| self.source(f) == x && self.target(f) == y).collect()
    }

    /// Composable pairs `(f, g)` in table order.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.compose.keys().copied().collect();
        out.sort();
        out
    }

    /// The category with one object `x` and only its identity.
    pub fn terminal() -> Self {
        Self::new(&["x"], &[("i", "x", "x")], &[("x", "i")], &[("i", "i", "i")]).expect("valid")
    }

    /// Two objects with mutually inverse `f: x → y` and `g: y → x`.
    pub fn groupoid() -> Self {
        Self::new(
            &["x", "y"],
            &[("ix", "x", "x"), ("iy", "y", "y"), ("f", "x", "y"), ("g", "y", "x")],
            &[("x", "ix"), ("y", "iy")],
            &[
                ("ix", "ix", "ix"),
                ("ix", "f", "f"),
                ("iy", "iy", "iy"),
                ("iy", "g", "g"),
                ("f", "iy", "f"),
                ("f", "g", "ix"),
                ("g", "ix", "g"),
                ("g", "f", "iy"),
            ],
        )
        .expect("valid")
    }

    /// Two objects and their identities only.
    pub fn discrete_two() -> Self {
        Self::new(
            &["x", "y"],
            &[("ix", "x", "x"), ("iy", "y", "y")],
            &[("x", "ix"), ("y", "iy")],
            &[("ix", "ix", "ix"), ("iy", "iy", "iy")],
        )
        .expect("valid")
    }
}
