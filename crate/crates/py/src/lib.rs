//! Python module `efd`: structures, distances, games and proof checking.
//! Rationals cross the boundary as `"p/q"` strings, structured results as
//! plain dicts and lists.

use std::sync::Arc;

use efd_core::bnf::{CanonicalPosition, PseudoDistance, DEFAULT_CLOSURE_DEPTH};
use efd_core::clocks::{ClockOrder, Rank};
use efd_core::game::{self, GameConfig, GameState, Move, Player, StrategyCertificate};
use efd_core::lang::{fixture, MetricLanguage, WeakModulus};
use efd_core::proofs::{check_proof, synthesize_equivalence_proof, t0_axioms, FiniteCategory, ProofSequence};
use efd_core::structure::{self, FiniteStructure};
use efd_core::{Error, Rational};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(msg) => PyIOError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn rational(s: &str) -> PyResult<Rational> {
    Rational::parse_lenient(s).map_err(err)
}

fn rank(alpha: Option<u64>) -> Rank {
    alpha.map_or(Rank::Infinite, Rank::Finite)
}

fn omega(spec: &str) -> PyResult<WeakModulus> {
    WeakModulus::parse_spec(spec).map_err(err)
}

/// Converts a JSON value into Python objects through the `json` module.
fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn player(s: &str) -> PyResult<Player> {
    match s {
        "I" => Ok(Player::I),
        "II" => Ok(Player::II),
        other => Err(PyValueError::new_err(format!("unknown player {other:?}"))),
    }
}

#[pyclass(name = "Structure", module = "efd", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStructure {
    inner: FiniteStructure,
}

#[pymethods]
impl PyStructure {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyStructure { inner: FiniteStructure::from_json(text, None).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyStructure { inner: FiniteStructure::load(path).map_err(err)? })
    }

    /// A structure whose `language` field names a built-in fixture.
    #[staticmethod]
    fn with_fixture(language: &str, text: &str) -> PyResult<Self> {
        let lang = Arc::new(fixture(language).map_err(err)?);
        let v: Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyStructure { inner: FiniteStructure::from_value_with(&v, lang).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (d, prefix = "a"))]
    fn two_point(d: &str, prefix: &str) -> PyResult<Self> {
        Ok(PyStructure { inner: structure::two_point(rational(d)?, prefix) })
    }

    #[staticmethod]
    #[pyo3(signature = (table, prefix = "a"))]
    fn metric_space(table: Vec<Vec<String>>, prefix: &str) -> PyResult<Self> {
        let t = table
            .iter()
            .map(|row| row.iter().map(|x| rational(x)).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        let s = structure::metric_space(&t, prefix);
        let report = s.validate();
        if !report.is_ok() {
            return Err(PyValueError::new_err(report.to_string()));
        }
        Ok(PyStructure { inner: s })
    }

    #[staticmethod]
    #[pyo3(signature = (n, prefix = "a"))]
    fn chain(n: usize, prefix: &str) -> Self {
        PyStructure { inner: structure::chain(n, prefix) }
    }

    #[staticmethod]
    #[pyo3(signature = (n, edges, prefix = "v"))]
    fn graph(n: usize, edges: Vec<(usize, usize)>, prefix: &str) -> PyResult<Self> {
        if edges.iter().any(|&(u, v)| u >= n || v >= n) {
            return Err(PyValueError::new_err("edge endpoint out of range"));
        }
        Ok(PyStructure { inner: structure::graph(n, &edges, prefix) })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Element ids of each sort.
    fn universes(&self) -> Vec<Vec<String>> {
        (0..self.inner.sort_count()).map(|s| self.inner.universe(s).to_vec()).collect()
    }

    /// Validation defects; empty when the structure is well formed.
    fn defects(&self) -> Vec<String> {
        self.inner.validate().defects
    }

    fn is_isomorphic(&self, other: &PyStructure) -> bool {
        structure::find_isomorphism(&self.inner, &other.inner).is_some()
    }

    fn __len__(&self) -> usize {
        self.inner.elements().count()
    }

    fn __repr__(&self) -> String {
        format!("Structure({} elements)", self.inner.elements().count())
    }
}

/// `r_alpha(A, B)` at the pledged pairs, with `alpha=None` for the stabilized
/// distance. Returns `(r, alpha_star)`; `alpha_star` is `None` when the
/// instance is too large to tabulate.
#[pyfunction]
#[pyo3(signature = (a, b, alpha = None, pledges = Vec::new(), omega_spec = "default", depth = DEFAULT_CLOSURE_DEPTH))]
fn distance(
    a: &PyStructure,
    b: &PyStructure,
    alpha: Option<u64>,
    pledges: Vec<(String, String)>,
    omega_spec: &str,
    depth: usize,
) -> PyResult<(String, Option<u64>)> {
    let p = CanonicalPosition::from_ids(&a.inner, &b.inner, &pledges).map_err(err)?;
    let d = PseudoDistance::new(&a.inner, &b.inner, &omega(omega_spec)?, depth).map_err(err)?;
    let r = d.r(rank(alpha), &p).map_err(err)?;
    Ok((r.to_string(), d.alpha_star()))
}

#[pyfunction]
#[pyo3(signature = (a, b, alpha = None, omega_spec = "default", depth = DEFAULT_CLOSURE_DEPTH))]
fn equivalent(a: &PyStructure, b: &PyStructure, alpha: Option<u64>, omega_spec: &str, depth: usize) -> PyResult<bool> {
    efd_core::bnf::equiv_bf(&a.inner, &b.inner, rank(alpha), &omega(omega_spec)?, depth).map_err(err)
}

fn move_from(py_move: &Bound<'_, PyAny>) -> PyResult<Move> {
    let text: String = py_move.py().import("json")?.call_method1("dumps", (py_move,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// A game with its current state. The engine plays the winner's certificate
/// on the winning side and hint-greedy otherwise.
#[pyclass(name = "Game", module = "efd", unsendable)]
struct PyGame {
    game: game::Game,
    state: GameState,
    certificate: Option<StrategyCertificate>,
}

#[pymethods]
impl PyGame {
    #[new]
    #[pyo3(signature = (a, b, clock, epsilon, omega_spec = "default", depth = DEFAULT_CLOSURE_DEPTH))]
    fn new(a: &PyStructure, b: &PyStructure, clock: &str, epsilon: &str, omega_spec: &str, depth: usize) -> PyResult<Self> {
        let mut cfg = GameConfig::new(a.inner.clone(), b.inner.clone(), ClockOrder::parse(clock).map_err(err)?, rational(epsilon)?);
        cfg.omega = omega(omega_spec)?;
        cfg.closure_depth = depth;
        let game = game::Game::new(cfg).map_err(err)?;
        let state = game.new_game();
        Ok(PyGame { game, state, certificate: None })
    }

    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let game = game::Game::new(GameConfig::from_json(text, None).map_err(err)?).map_err(err)?;
        let state = game.new_game();
        Ok(PyGame { game, state, certificate: None })
    }

    /// `{"winner", "deciding_value", "stabilization_rank"}`.
    fn solve(&mut self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let r = self.game.solve().map_err(err)?;
        let out = serde_json::json!({
            "winner": r.winner,
            "deciding_value": r.deciding_value,
            "stabilization_rank": r.stabilization_rank,
        });
        self.certificate = Some(r.certificate);
        to_py(py, &out)
    }

    /// The winner's certificate as JSON, or an error for the loser.
    fn strategy(&self, player_name: &str) -> PyResult<String> {
        Ok(self.game.extract_strategy(player(player_name)?).map_err(err)?.to_json())
    }

    /// Verifies a certificate; returns `(ok, violation)`.
    #[pyo3(signature = (certificate, depth = 6))]
    fn verify(&self, certificate: &str, depth: usize) -> PyResult<(bool, Option<String>)> {
        let cert = StrategyCertificate::from_json(certificate).map_err(err)?;
        let v = self.game.verify_strategy(&cert, depth);
        Ok((v.ok, v.violation))
    }

    fn state(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let v = game::Verdict::of(&self.game, &self.state);
        let mut out = serde_json::to_value(&v).expect("verdict serializes");
        out["to_move"] = serde_json::json!(self.state.to_move());
        out["clock"] = Value::String(self.state.clock.to_string());
        to_py(py, &out)
    }

    fn reset(&mut self) {
        self.state = self.game.new_game();
    }

    /// Applies a move dict such as `{"type": "challenge", "clock": "1",
    /// "side": "A", "element": "a2"}` or `{"type": "response", "element": "b1"}`.
    fn play(&mut self, py: Python<'_>, mv: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        self.state = self.game.apply_move(&self.state, &move_from(mv)?).map_err(err)?;
        self.state(py)
    }

    /// Plays and returns the engine's move for the player to move.
    fn engine_move(&mut self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        if self.certificate.is_none() {
            self.certificate = Some(self.game.solve().map_err(err)?.certificate);
        }
        let mv = self.game.reply(&self.state, self.certificate.as_ref()).map_err(err)?;
        self.state = self.game.apply_move(&self.state, &mv).map_err(err)?;
        to_py(py, &serde_json::to_value(&mv).expect("move serializes"))
    }

    fn hints(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let h = self.game.hint(&self.state).map_err(err)?;
        to_py(py, &serde_json::to_value(&h).expect("hints serialize"))
    }
}

/// Checks a proof against the presentation theory; returns
/// `(valid, invalid_at, reason)`.
#[pyfunction]
fn prove_check(category_json: &str, proof_json: &str) -> PyResult<(bool, Option<usize>, Option<String>)> {
    let cat = FiniteCategory::from_json(category_json).map_err(err)?;
    let proof = ProofSequence::from_json(proof_json, &cat).map_err(err)?;
    let v = check_proof(&cat, &t0_axioms(&cat), &proof);
    Ok((v.valid, v.invalid_at, v.reason))
}

/// A proof that `x` and `y` are isomorphic, as JSON, if the presentation has
/// mutually inverse morphisms between them.
#[pyfunction]
fn synthesize_equivalence(category_json: &str, x: &str, y: &str) -> PyResult<Option<String>> {
    let cat = FiniteCategory::from_json(category_json).map_err(err)?;
    Ok(synthesize_equivalence_proof(&cat, x, y).map_err(err)?.map(|p| p.to_json(&cat)))
}

#[pyfunction]
fn validate_language(text: &str) -> PyResult<Vec<String>> {
    Ok(MetricLanguage::from_json(text).map_err(err)?.validate().defects)
}

#[pymodule]
fn efd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyStructure>()?;
    m.add_class::<PyGame>()?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(prove_check, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(validate_language, m)?)?;
    Ok(())
}
