//! The dynamic metric EF game: a clock from a linear order, spoiler
//! challenges, duplicator responses, and a winning condition on the
//! base distance of the pledged pairs.

mod certificate;
mod engine;
mod solve;
mod transcript;
mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bnf::{CanonicalPosition, Pair, PseudoDistance, Side, DEFAULT_CLOSURE_DEPTH};
use crate::clocks::{is_minimum, is_well_order, legal_decrement, ClockOrder, ClockValue};
use crate::error::{Error, Result};
use crate::lang::WeakModulus;
use crate::rational::Rational;
use crate::structure::{validate_structure, FiniteStructure};

pub use certificate::{ChallengeChoice, Room, StrategyCertificate};
pub use engine::Hint;
pub use solve::SolveResult;
pub use transcript::{replay, Transcript, Verdict, TRANSCRIPT_SCHEMA};
pub use verify::Verification;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::I => Player::II,
            Player::II => Player::I,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::I => write!(f, "I"),
            Player::II => write!(f, "II"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    pub a: FiniteStructure,
    pub b: FiniteStructure,
    pub clock: ClockOrder,
    pub epsilon: Rational,
    pub omega: WeakModulus,
    pub closure_depth: usize,
}

impl GameConfig {
    /// A configuration with the default weak modulus and closure depth.
    pub fn new(a: FiniteStructure, b: FiniteStructure, clock: ClockOrder, epsilon: Rational) -> Self {
        GameConfig { a, b, clock, epsilon, omega: WeakModulus::default(), closure_depth: DEFAULT_CLOSURE_DEPTH }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_positive() {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        if self.a.language() != self.b.language() {
            return Err(Error::Invalid("structures have different languages".into()));
        }
        for (name, s) in [("A", &self.a), ("B", &self.b)] {
            let report = validate_structure(s);
            if !report.is_ok() {
                return Err(Error::Invalid(format!("structure {name}: {}", report.defects.join("; "))));
            }
        }
        Ok(())
    }

    pub fn structure(&self, side: Side) -> &FiniteStructure {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }
}

/// One completed round.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Round {
    pub clock: ClockValue,
    pub side: Side,
    pub sort: usize,
    pub spoiler: usize,
    pub duplicator: usize,
}

impl Round {
    pub fn pair(&self) -> Pair {
        match self.side {
            Side::A => Pair::new(self.sort, self.spoiler, self.duplicator),
            Side::B => Pair::new(self.sort, self.duplicator, self.spoiler),
        }
    }
}

/// A spoiler half-move awaiting the duplicator's answer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pending {
    pub clock: ClockValue,
    pub side: Side,
    pub sort: usize,
    pub elem: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    InProgress,
    Finished(Player),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameState {
    /// The clock value of the last challenge, `Top` before the first.
    pub clock: ClockValue,
    pub rounds: Vec<Round>,
    pub pending: Option<Pending>,
    pub status: Status,
    /// On clocks without a minimum: every completed round so far kept the
    /// base distance below ε.
    pub survived: bool,
}

impl GameState {
    pub fn position(&self) -> CanonicalPosition {
        self.rounds.iter().map(Round::pair).collect()
    }

    pub fn to_move(&self) -> Option<Player> {
        match (self.status, &self.pending) {
            (Status::Finished(_), _) => None,
            (Status::InProgress, None) => Some(Player::I),
            (Status::InProgress, Some(_)) => Some(Player::II),
        }
    }
}

/// A move, with elements named by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Move {
    Challenge { clock: String, side: Side, element: String },
    Response { element: String },
}

/// What the player to move may do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LegalMoves {
    GameOver,
    /// Any clock value strictly below `below`, with any element of either
    /// structure.
    Challenge { below: ClockValue, a: Vec<String>, b: Vec<String> },
    /// An element on `side` of the sort of the challenge.
    Response { side: Side, elements: Vec<String> },
}

fn ids_unique(s: &FiniteStructure) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    s.elements().all(|e| seen.insert(s.elem_id(e).to_string()))
}

/// A configuration together with its distance memo tables.
pub struct Game {
    config: GameConfig,
    dist: PseudoDistance,
}

impl Game {
    pub fn new(config: GameConfig) -> Result<Self> {
        config.validate()?;
        for (name, s) in [("A", &config.a), ("B", &config.b)] {
            if !ids_unique(s) {
                return Err(Error::Invalid(format!("structure {name}: element ids must be unique across sorts")));
            }
        }
        let dist = PseudoDistance::new(&config.a, &config.b, &config.omega, config.closure_depth)?;
        Ok(Game { config, dist })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn distance(&self) -> &PseudoDistance {
        &self.dist
    }

    fn lost(&self, p: &CanonicalPosition) -> bool {
        self.dist.r0(p) >= self.config.epsilon
    }

    pub fn new_game(&self) -> GameState {
        let mut state = GameState {
            clock: ClockValue::Top,
            rounds: Vec::new(),
            pending: None,
            status: Status::InProgress,
            survived: false,
        };
        if self.lost(&CanonicalPosition::empty()) {
            state.status = Status::Finished(Player::I);
        } else if is_minimum(&self.config.clock, &ClockValue::Top) {
            state.status = Status::Finished(Player::II);
        } else {
            state.survived = !is_well_order(&self.config.clock);
        }
        state
    }

    pub fn legal_moves(&self, state: &GameState) -> LegalMoves {
        if state.status != Status::InProgress {
            return LegalMoves::GameOver;
        }
        match &state.pending {
            None => LegalMoves::Challenge {
                below: state.clock.clone(),
                a: self.config.a.elements().map(|e| self.config.a.elem_id(e).to_string()).collect(),
                b: self.config.b.elements().map(|e| self.config.b.elem_id(e).to_string()).collect(),
            },
            Some(p) => {
                let side = p.side.other();
                let s = self.config.structure(side);
                LegalMoves::Response { side, elements: s.universe(p.sort).to_vec() }
            }
        }
    }

    pub fn apply_move(&self, state: &GameState, mv: &Move) -> Result<GameState> {
        if let Status::Finished(w) = state.status {
            return Err(Error::IllegalMove(format!("the game is over (winner {w})")));
        }
        let order = &self.config.clock;
        let mut next = state.clone();
        match (mv, &state.pending) {
            (Move::Challenge { clock, side, element }, None) => {
                let value = order.parse_value(clock).map_err(|e| Error::IllegalMove(e.to_string()))?;
                if value == ClockValue::Top || !legal_decrement(order, &state.clock, &value)? {
                    return Err(Error::IllegalMove("clock must strictly decrease".into()));
                }
                let s = self.config.structure(*side);
                let e = s
                    .find(element)
                    .ok_or_else(|| Error::IllegalMove(format!("unknown element {element} in {side}")))?;
                next.pending = Some(Pending { clock: value, side: *side, sort: e.sort, elem: e.index });
            }
            (Move::Response { element }, Some(p)) => {
                let side = p.side.other();
                let s = self.config.structure(side);
                let e = s
                    .find(element)
                    .ok_or_else(|| Error::IllegalMove(format!("unknown element {element} in {side}")))?;
                if e.sort != p.sort {
                    return Err(Error::IllegalMove(format!("{element} is not of the challenged sort")));
                }
                next.rounds.push(Round { clock: p.clock.clone(), side: p.side, sort: p.sort, spoiler: p.elem, duplicator: e.index });
                next.clock = p.clock.clone();
                next.pending = None;
                if self.lost(&next.position()) {
                    next.status = Status::Finished(Player::I);
                    next.survived = false;
                } else if is_minimum(order, &next.clock) {
                    next.status = Status::Finished(Player::II);
                }
            }
            (Move::Challenge { .. }, Some(_)) => {
                return Err(Error::IllegalMove("the duplicator must respond first".into()));
            }
            (Move::Response { .. }, None) => {
                return Err(Error::IllegalMove("no challenge to respond to".into()));
            }
        }
        Ok(next)
    }

    /// The base distance of the current position.
    pub fn current_r0(&self, state: &GameState) -> Rational {
        self.dist.r0(&state.position())
    }
}

pub fn new_game(config: &GameConfig) -> Result<GameState> {
    Ok(Game::new(config.clone())?.new_game())
}

pub fn solve(config: &GameConfig) -> Result<SolveResult> {
    Game::new(config.clone())?.solve()
}

pub fn extract_strategy(config: &GameConfig, player: Player) -> Result<StrategyCertificate> {
    Game::new(config.clone())?.extract_strategy(player)
}

pub fn verify_strategy(config: &GameConfig, cert: &StrategyCertificate, unroll_depth: usize) -> Result<Verification> {
    Ok(Game::new(config.clone())?.verify_strategy(cert, unroll_depth))
}

#[cfg(test)]
mod tests;
