//! Game configuration files and transcripts.
//!
//! ```json
//! {"language": {...}, "a": {...}, "b": {...}, "clock": "2",
//!  "epsilon": "3/5", "omega": {"prefix": [], "tail": {"constant": "1/1"}},
//!  "closure_depth": 3}
//! ```
//!
//! `a` and `b` are structure objects; they may carry their own `language`
//! when the top-level one is absent. A transcript adds `schema`, the list
//! of moves, and the verdict reached by replaying them.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Game, GameConfig, GameState, Move, Player, Status};
use crate::bnf::DEFAULT_CLOSURE_DEPTH;
use crate::clocks::ClockOrder;
use crate::error::{Error, Result};
use crate::lang::{MetricLanguage, WeakModulus};
use crate::rational::Rational;
use crate::structure::FiniteStructure;

pub const TRANSCRIPT_SCHEMA: &str = "efd/1";

fn structure_value(s: &FiniteStructure) -> Value {
    let mut v = s.to_value();
    v.as_object_mut().expect("object").remove("language");
    v
}

impl GameConfig {
    pub fn to_value(&self) -> Value {
        json!({
            "language": self.a.language(),
            "a": structure_value(&self.a),
            "b": structure_value(&self.b),
            "clock": self.clock,
            "epsilon": self.epsilon,
            "omega": self.omega,
            "closure_depth": self.closure_depth,
        })
    }

    pub fn from_value(value: &Value, base_dir: Option<&Path>) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::Parse("config must be an object".into()))?;
        for key in obj.keys() {
            if !["language", "a", "b", "clock", "epsilon", "omega", "closure_depth"].contains(&key.as_str()) {
                return Err(Error::Parse(format!("unknown config key {key:?}")));
            }
        }
        let get = |key: &str| obj.get(key).ok_or_else(|| Error::Parse(format!("config is missing {key:?}")));
        let (a, b) = match obj.get("language") {
            Some(Value::String(path)) => {
                let path = base_dir.map(|d| d.join(path)).unwrap_or_else(|| path.into());
                let lang = Arc::new(MetricLanguage::load(path)?);
                (FiniteStructure::from_value_with(get("a")?, lang.clone())?, FiniteStructure::from_value_with(get("b")?, lang)?)
            }
            Some(v) => {
                let lang = Arc::new(serde_json::from_value::<MetricLanguage>(v.clone())?);
                (FiniteStructure::from_value_with(get("a")?, lang.clone())?, FiniteStructure::from_value_with(get("b")?, lang)?)
            }
            None => (FiniteStructure::from_value(get("a")?, base_dir)?, FiniteStructure::from_value(get("b")?, base_dir)?),
        };
        let clock: ClockOrder = serde_json::from_value(get("clock")?.clone())?;
        let epsilon: Rational = serde_json::from_value(get("epsilon")?.clone())?;
        let omega = match obj.get("omega") {
            Some(Value::String(s)) => WeakModulus::parse_spec(s)?,
            Some(v) => serde_json::from_value(v.clone())?,
            None => WeakModulus::default(),
        };
        let closure_depth = match obj.get("closure_depth") {
            Some(v) => serde_json::from_value(v.clone())?,
            None => DEFAULT_CLOSURE_DEPTH,
        };
        Ok(GameConfig { a, b, clock, epsilon, omega, closure_depth })
    }

    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        Self::from_value(&serde_json::from_str(text)?, base_dir)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("config serializes")
    }
}

/// The outcome recorded at the end of a transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: String,
    pub winner: Option<Player>,
    pub survived: bool,
    pub rounds: usize,
    pub r0: Rational,
}

impl Verdict {
    pub fn of(game: &Game, state: &GameState) -> Verdict {
        let (status, winner) = match state.status {
            Status::InProgress => ("in_progress", None),
            Status::Finished(w) => ("finished", Some(w)),
        };
        Verdict {
            status: status.into(),
            winner,
            survived: state.survived,
            rounds: state.rounds.len(),
            r0: game.current_r0(state),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    pub config: GameConfig,
    pub moves: Vec<Move>,
    pub verdict: Option<Verdict>,
}

impl Transcript {
    pub fn new(config: GameConfig) -> Self {
        Transcript { config, moves: Vec::new(), verdict: None }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "schema": TRANSCRIPT_SCHEMA,
            "config": self.config.to_value(),
            "moves": self.moves,
            "verdict": self.verdict,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("transcript serializes")
    }

    pub fn from_value(value: &Value, base_dir: Option<&Path>) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::Parse("transcript must be an object".into()))?;
        match obj.get("schema").and_then(Value::as_str) {
            Some(TRANSCRIPT_SCHEMA) => {}
            other => return Err(Error::Parse(format!("unsupported transcript schema {other:?}"))),
        }
        let config = GameConfig::from_value(obj.get("config").ok_or_else(|| Error::Parse("missing config".into()))?, base_dir)?;
        let moves = serde_json::from_value(obj.get("moves").cloned().unwrap_or(Value::Array(Vec::new())))?;
        let verdict = serde_json::from_value(obj.get("verdict").cloned().unwrap_or(Value::Null))?;
        Ok(Transcript { config, moves, verdict })
    }

    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        Self::from_value(&serde_json::from_str(text)?, base_dir)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent())
    }
}

/// Replays the moves of a transcript and returns the final state with its
/// verdict, failing on the first illegal move.
pub fn replay(t: &Transcript) -> Result<(GameState, Verdict)> {
    let game = Game::new(t.config.clone())?;
    let mut state = game.new_game();
    for (i, mv) in t.moves.iter().enumerate() {
        state = game
            .apply_move(&state, mv)
            .map_err(|e| Error::IllegalMove(format!("move {}: {e}", i + 1)))?;
    }
    let verdict = Verdict::of(&game, &state);
    Ok((state, verdict))
}
