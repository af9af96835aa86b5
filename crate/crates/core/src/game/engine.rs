use serde::Serialize;

use super::certificate::StrategyCertificate;
use super::{Game, GameState, Move, Player, Status};
use crate::bnf::{Pair, Side};
use crate::clocks::{ClockOrder, ClockValue};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// One candidate move with the distance it leads to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hint {
    /// The clock of a candidate challenge; absent for responses.
    pub clock: Option<String>,
    pub side: Side,
    pub element: String,
    /// For a response, `r` at the challenge clock after pledging it; for a
    /// challenge, the least such value over all responses.
    pub value: Rational,
    /// Whether the move keeps its player on the winning side.
    pub winning: bool,
}

impl Game {
    fn mover(&self, state: &GameState) -> Result<Player> {
        match state.status {
            Status::Finished(w) => Err(Error::IllegalMove(format!("the game is over (winner {w})"))),
            Status::InProgress => Ok(state.to_move().expect("in progress")),
        }
    }

    fn next_star(cur: &ClockValue) -> ClockValue {
        match cur {
            ClockValue::Star(k) => ClockValue::Star(k + 1),
            _ => ClockValue::Star(0),
        }
    }

    /// The certificate's move at `state`.
    pub fn engine_move(&self, state: &GameState, cert: &StrategyCertificate) -> Result<Move> {
        let mover = self.mover(state)?;
        if mover != cert.player {
            return Err(Error::IllegalMove(format!("it is player {mover}'s turn, not {}", cert.player)));
        }
        let p = state.position();
        match &state.pending {
            Some(pending) => {
                let room = cert.room_of(&pending.clock)?;
                let d = cert.response(room, &p, pending.side, pending.sort, pending.elem).ok_or_else(|| {
                    Error::OutsideCertificate(format!("no response at ({}, {room}) for {:?}", pending.clock, p))
                })?;
                let other = self.config.structure(pending.side.other());
                Ok(Move::Response { element: other.universe(pending.sort)[d].clone() })
            }
            None => {
                let room = cert.room_of(&state.clock)?;
                let choice = cert
                    .challenge(room, &p)
                    .ok_or_else(|| Error::OutsideCertificate(format!("no challenge at ({}, {room}) for {:?}", state.clock, p)))?;
                let clock = match &self.config.clock {
                    ClockOrder::OmegaStar => Self::next_star(&state.clock),
                    order => order
                        .value_of_rank(choice.rank)
                        .ok_or_else(|| Error::OutsideCertificate(format!("rank {} is not a clock value", choice.rank)))?,
                };
                let s = self.config.structure(choice.side);
                Ok(Move::Challenge {
                    clock: clock.to_string(),
                    side: choice.side,
                    element: s.universe(choice.sort)[choice.elem].clone(),
                })
            }
        }
    }

    /// Every candidate move for the player to move, annotated with the
    /// distance it leads to.
    pub fn hint(&self, state: &GameState) -> Result<Vec<Hint>> {
        self.mover(state)?;
        let mask = self.dist.mask(&state.position());
        let eps = self.eps_index();
        let mut hints = Vec::new();
        match &state.pending {
            Some(pending) => {
                let room = self.room(&pending.clock)?;
                let side = pending.side.other();
                let s = self.config.structure(side);
                for (d, id) in s.universe(pending.sort).iter().enumerate() {
                    let pair = match pending.side {
                        Side::A => Pair::new(pending.sort, pending.elem, d),
                        Side::B => Pair::new(pending.sort, d, pending.elem),
                    };
                    let v = self.dist_index(room, mask | 1u128 << self.dist.pair_index(pair))?;
                    hints.push(Hint { clock: None, side, element: id.clone(), value: self.dist.value(v).clone(), winning: v < eps });
                }
            }
            None => {
                let mut rooms = Vec::new();
                for (beta, room) in self.clock_options(&state.clock)? {
                    if rooms.contains(&room) {
                        continue;
                    }
                    rooms.push(room);
                    for ch in self.dist.challenges() {
                        let mut m = u32::MAX;
                        for &pair in &ch.responses {
                            m = m.min(self.dist_index(room, mask | 1u128 << self.dist.pair_index(pair))?);
                        }
                        let s = self.config.structure(ch.side);
                        hints.push(Hint {
                            clock: Some(beta.to_string()),
                            side: ch.side,
                            element: s.universe(ch.sort)[ch.elem].clone(),
                            value: self.dist.value(m).clone(),
                            winning: m >= eps,
                        });
                    }
                }
            }
        }
        Ok(hints)
    }

    /// The hint-greedy move: the spoiler maximizes the distance it forces,
    /// preferring the lowest clock; the duplicator minimizes.
    pub fn greedy_move(&self, state: &GameState) -> Result<Move> {
        let hints = self.hint(state)?;
        let pick = match &state.pending {
            Some(_) => hints.iter().min_by(|x, y| x.value.cmp(&y.value)),
            None => hints.iter().rev().max_by(|x, y| x.value.cmp(&y.value)),
        };
        let h = pick.ok_or_else(|| Error::IllegalMove("no moves available".into()))?;
        Ok(match &h.clock {
            Some(clock) => Move::Challenge { clock: clock.clone(), side: h.side, element: h.element.clone() },
            None => Move::Response { element: h.element.clone() },
        })
    }

    /// The engine's move: the certificate's when it has one for the player to
    /// move, otherwise hint-greedy.
    pub fn reply(&self, state: &GameState, cert: Option<&StrategyCertificate>) -> Result<Move> {
        match cert {
            Some(c) if state.to_move() == Some(c.player) => match self.engine_move(state, c) {
                Err(Error::OutsideCertificate(_)) => self.greedy_move(state),
                other => other,
            },
            _ => self.greedy_move(state),
        }
    }
}
