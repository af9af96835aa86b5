//! The structure file format.
//!
//! ```json
//! {"language": {...} | "lang.json",
//!  "universes": {"M": ["a1", "a2"]},
//!  "metric": {"M": [["0/1", "1/1"], ["1/1", "0/1"]]},
//!  "relations": {"E": [["0/1", "1/1"], ["1/1", "0/1"]]},
//!  "functions": {"f": ["a2", "a2"]},
//!  "constants": {"c": "a1"}}
//! ```
//!
//! Tables are nested arrays with one level per argument. A language given as
//! a string is a path resolved against the structure file's directory.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::{Elem, FiniteStructure};
use crate::error::{Error, Result};
use crate::lang::MetricLanguage;
use crate::rational::Rational;

impl FiniteStructure {
    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value, base_dir)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent())
    }

    pub fn from_value(value: &Value, base_dir: Option<&Path>) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| parse("structure must be an object"))?;
        let language = match obj.get("language") {
            Some(Value::String(p)) => {
                let path = base_dir.map(|d| d.join(p)).unwrap_or_else(|| p.into());
                MetricLanguage::load(path)?
            }
            Some(v @ Value::Object(_)) => serde_json::from_value(v.clone())?,
            _ => return Err(parse("missing language")),
        };
        Self::from_value_with(value, Arc::new(language))
    }

    /// Parses a structure, ignoring any `language` field in favour of `language`.
    pub fn from_value_with(value: &Value, language: Arc<MetricLanguage>) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| parse("structure must be an object"))?;
        let lang = &*language;
        let section = |key: &str| -> Result<Map<String, Value>> {
            match obj.get(key) {
                None => Ok(Map::new()),
                Some(Value::Object(m)) => Ok(m.clone()),
                Some(_) => Err(parse(&format!("{key} must be an object"))),
            }
        };
        let (universes_v, metric_v, relations_v, functions_v, constants_v) =
            (section("universes")?, section("metric")?, section("relations")?, section("functions")?, section("constants")?);
        reject_unknown(&universes_v, lang.sorts.iter().map(|s| &s.name), "sort")?;
        reject_unknown(&metric_v, lang.sorts.iter().map(|s| &s.name), "sort")?;
        reject_unknown(&relations_v, lang.relations.iter().map(|s| &s.name), "relation")?;
        reject_unknown(&functions_v, lang.functions.iter().map(|s| &s.name), "function")?;
        reject_unknown(&constants_v, lang.constants.iter().map(|s| &s.name), "constant")?;

        let mut universes = Vec::new();
        for s in &lang.sorts {
            let ids: Vec<String> = match universes_v.get(&s.name) {
                Some(v) => serde_json::from_value(v.clone())?,
                None => return Err(parse(&format!("missing universe for sort {}", s.name))),
            };
            universes.push(ids);
        }
        let lookup: Vec<BTreeMap<&str, usize>> = universes
            .iter()
            .map(|u| u.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect())
            .collect();
        let sizes = |args: &[String]| -> Result<Vec<usize>> {
            args.iter().map(|a| lang.sort_id(a).map(|s| universes[s].len())).collect()
        };
        let mut metric = Vec::new();
        for (i, s) in lang.sorts.iter().enumerate() {
            let v = metric_v.get(&s.name).ok_or_else(|| parse(&format!("missing metric for sort {}", s.name)))?;
            let n = universes[i].len();
            metric.push(flatten(v, &[n, n], &mut |x| rational(x))?);
        }
        let mut relations = Vec::new();
        for r in &lang.relations {
            let v = relations_v.get(&r.name).ok_or_else(|| parse(&format!("missing table for relation {}", r.name)))?;
            relations.push(flatten(v, &sizes(&r.args)?, &mut |x| rational(x))?);
        }
        let element = |sort: usize, x: &Value| -> Result<usize> {
            let id = x.as_str().ok_or_else(|| parse("element ids must be strings"))?;
            lookup[sort]
                .get(id)
                .copied()
                .ok_or_else(|| Error::Unknown { kind: "element", name: id.into() })
        };
        let mut functions = Vec::new();
        for f in &lang.functions {
            let v = functions_v.get(&f.name).ok_or_else(|| parse(&format!("missing table for function {}", f.name)))?;
            let result = lang.sort_id(&f.result)?;
            functions.push(flatten(v, &sizes(&f.args)?, &mut |x| element(result, x))?);
        }
        let mut constants = Vec::new();
        for c in &lang.constants {
            let v = constants_v.get(&c.name).ok_or_else(|| parse(&format!("missing value for constant {}", c.name)))?;
            constants.push(element(lang.sort_id(&c.sort)?, v)?);
        }
        FiniteStructure::new(language, universes, metric, relations, functions, constants)
    }

    /// Serializes with the language inlined.
    pub fn to_value(&self) -> Value {
        let lang = self.language();
        let mut universes = Map::new();
        let mut metric = Map::new();
        for (i, s) in lang.sorts.iter().enumerate() {
            universes.insert(s.name.clone(), json!(self.universe(i)));
            let n = self.size(i);
            metric.insert(s.name.clone(), nest(self.metric_table(i), &[n, n], &|q| json!(q.to_string())));
        }
        let mut relations = Map::new();
        for (r, decl) in lang.relations.iter().enumerate() {
            let dims: Vec<_> = self.arg_sorts(&decl.args).iter().map(|&s| self.size(s)).collect();
            relations.insert(decl.name.clone(), nest(self.relation_table(r), &dims, &|q| json!(q.to_string())));
        }
        let mut functions = Map::new();
        for (f, decl) in lang.functions.iter().enumerate() {
            let dims: Vec<_> = self.arg_sorts(&decl.args).iter().map(|&s| self.size(s)).collect();
            let result = lang.sort_index(&decl.result).expect("validated");
            functions.insert(
                decl.name.clone(),
                nest(self.function_table(f), &dims, &|&e| json!(self.elem_id(Elem { sort: result, index: e }))),
            );
        }
        let mut constants = Map::new();
        for (c, decl) in lang.constants.iter().enumerate() {
            let sort = lang.sort_index(&decl.sort).expect("validated");
            constants.insert(decl.name.clone(), json!(self.elem_id(Elem { sort, index: self.constant_value(c) })));
        }
        json!({
            "language": serde_json::to_value(lang).expect("language serializes"),
            "universes": universes,
            "metric": metric,
            "relations": relations,
            "functions": functions,
            "constants": constants,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("structure serializes")
    }
}

fn parse(msg: &str) -> Error {
    Error::Parse(msg.into())
}

fn rational(v: &Value) -> Result<Rational> {
    v.as_str().ok_or_else(|| parse("rationals must be \"p/q\" strings"))?.parse()
}

fn reject_unknown<'a>(map: &Map<String, Value>, known: impl Iterator<Item = &'a String>, kind: &'static str) -> Result<()> {
    let known: Vec<_> = known.collect();
    match map.keys().find(|k| !known.contains(k)) {
        Some(k) => Err(Error::Unknown { kind, name: k.clone() }),
        None => Ok(()),
    }
}

fn flatten<T>(v: &Value, dims: &[usize], leaf: &mut impl FnMut(&Value) -> Result<T>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    flatten_into(v, dims, leaf, &mut out)?;
    Ok(out)
}

fn flatten_into<T>(v: &Value, dims: &[usize], leaf: &mut impl FnMut(&Value) -> Result<T>, out: &mut Vec<T>) -> Result<()> {
    match dims.split_first() {
        None => {
            out.push(leaf(v)?);
            Ok(())
        }
        Some((&n, rest)) => {
            let arr = v.as_array().ok_or_else(|| parse("table nesting does not match arity"))?;
            if arr.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: arr.len() });
            }
            arr.iter().try_for_each(|x| flatten_into(x, rest, leaf, out))
        }
    }
}

fn nest<T>(flat: &[T], dims: &[usize], leaf: &impl Fn(&T) -> Value) -> Value {
    match dims.split_first() {
        None => leaf(&flat[0]),
        Some((&n, rest)) => {
            let stride: usize = rest.iter().product();
            Value::Array((0..n).map(|i| nest(&flat[i * stride..(i + 1) * stride], rest, leaf)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{chain, two_point};

    #[test]
    fn round_trip() {
        for s in [two_point(Rational::new(3, 2), "b"), chain(3, "c")] {
            let back = FiniteStructure::from_json(&s.to_json(), None).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.to_json(), s.to_json());
        }
    }

    #[test]
    fn parse_inline_file() {
        let text = r#"{"language":{"sorts":[{"name":"M","diameter":"2/1"}]},
            "universes":{"M":["a1","a2"]},"metric":{"M":[["0/1","1/1"],["1/1","0/1"]]}}"#;
        let s = FiniteStructure::from_json(text, None).unwrap();
        assert_eq!(s.dist(0, 0, 1), &Rational::one());
    }

    #[test]
    fn malformed_tables_are_errors() {
        let text = r#"{"language":{"sorts":[{"name":"M","diameter":"2/1"}]},
            "universes":{"M":["a1","a2"]},"metric":{"M":[["0/1","1/1"]]}}"#;
        assert!(FiniteStructure::from_json(text, None).is_err());
        let text = r#"{"language":{"sorts":[{"name":"M","diameter":"2/1"}]},
            "universes":{"M":["a1"]},"metric":{"M":[["1"]]}}"#;
        assert!(FiniteStructure::from_json(text, None).is_err());
    }
}
