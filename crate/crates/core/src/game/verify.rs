//! Unrolls a certificate into explicit plays and checks the strategy
//! conditions round by round.

use std::collections::HashMap;

use serde::Serialize;

use super::certificate::StrategyCertificate;
use super::{Game, Player};
use crate::bnf::{Pair, Side};
use crate::clocks::{is_minimum, legal_decrement, ClockOrder, ClockValue};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub ok: bool,
    pub violation: Option<String>,
    pub positions_checked: usize,
}

struct Walk<'a> {
    game: &'a Game,
    cert: &'a StrategyCertificate,
    checked: usize,
    explored: HashMap<(ClockValue, u128), usize>,
}

fn pair_of(side: Side, sort: usize, spoiler: usize, duplicator: usize) -> Pair {
    match side {
        Side::A => Pair::new(sort, spoiler, duplicator),
        Side::B => Pair::new(sort, duplicator, spoiler),
    }
}

impl Walk<'_> {
    fn id(&self, side: Side, sort: usize, elem: usize) -> String {
        self.game.config.structure(side).universe(sort).get(elem).cloned().unwrap_or_else(|| format!("#{elem}"))
    }

    /// Memo key: on ω* every value below the top plays alike.
    fn key(&self, cur: &ClockValue, mask: u128) -> (ClockValue, u128) {
        let v = match (&self.game.config.clock, cur) {
            (ClockOrder::OmegaStar, ClockValue::Star(_)) => ClockValue::Star(0),
            _ => cur.clone(),
        };
        (v, mask)
    }

    fn fresh(&mut self, cur: &ClockValue, mask: u128, depth: usize) -> bool {
        let key = self.key(cur, mask);
        match self.explored.get(&key) {
            Some(&d) if d >= depth => false,
            _ => {
                self.explored.insert(key, depth);
                self.checked += 1;
                true
            }
        }
    }

    fn duplicator(&mut self, cur: &ClockValue, mask: u128, depth: usize) -> Result<(), String> {
        if depth == 0 || is_minimum(&self.game.config.clock, cur) || !self.fresh(cur, mask, depth) {
            return Ok(());
        }
        let options = self.game.clock_options(cur).map_err(|e| e.to_string())?;
        let p = self.game.dist.position(mask);
        for (beta, _) in options {
            let room = self.cert.room_of(&beta).map_err(|e| e.to_string())?;
            for ch in self.game.dist.challenges() {
                let c = self.id(ch.side, ch.sort, ch.elem);
                let d = self
                    .cert
                    .response(room, &p, ch.side, ch.sort, ch.elem)
                    .ok_or_else(|| format!("missing response at ({beta}, {c})"))?;
                let other = self.game.config.structure(ch.side.other());
                if d >= other.size(ch.sort) {
                    return Err(format!("response #{d} at ({beta}, {c}) is outside the universe"));
                }
                let pair = pair_of(ch.side, ch.sort, ch.elem, d);
                let child = mask | 1u128 << self.game.dist.pair_index(pair);
                if self.game.r0_lost(child) {
                    let dd = self.id(ch.side.other(), ch.sort, d);
                    return Err(format!(
                        "r0 = {} is not below epsilon after ({beta}, {c}) answered by {dd}",
                        self.game.dist.value(self.game.dist.r0_index(child))
                    ));
                }
                self.duplicator(&beta, child, depth - 1)?;
            }
        }
        Ok(())
    }

    fn spoiler(&mut self, cur: &ClockValue, mask: u128, depth: usize, path: &mut Vec<u128>) -> Result<(), String> {
        if self.game.r0_lost(mask) {
            return Ok(());
        }
        let order = &self.game.config.clock;
        let position = || self.game.dist.position(mask).to_ids(&self.game.config.a, &self.game.config.b);
        if is_minimum(order, cur) {
            return Err(format!("II survives to the clock minimum {cur} at {:?}", position()));
        }
        if path.contains(&mask) && matches!(order, ClockOrder::OmegaStar) {
            return Err(format!("play repeats position {:?} without exposing a gap", position()));
        }
        if depth == 0 || !self.fresh(cur, mask, depth) {
            return Ok(());
        }
        let room = self.cert.room_of(cur).map_err(|e| e.to_string())?;
        let p = self.game.dist.position(mask);
        let choice = self
            .cert
            .challenge(room, &p)
            .ok_or_else(|| format!("missing challenge at ({cur}, {:?})", position()))?
            .clone();
        let beta = match order {
            ClockOrder::OmegaStar => match cur {
                ClockValue::Star(k) => ClockValue::Star(k + 1),
                _ => ClockValue::Star(0),
            },
            _ => order
                .value_of_rank(choice.rank)
                .ok_or_else(|| format!("rank {} is not a clock value", choice.rank))?,
        };
        if !legal_decrement(order, cur, &beta).unwrap_or(false) {
            return Err(format!("illegal clock {beta} below {cur}"));
        }
        let mine = self.game.config.structure(choice.side);
        if choice.sort >= mine.sort_count() || choice.elem >= mine.size(choice.sort) {
            return Err(format!("challenge at ({cur}, {:?}) is outside the universe", position()));
        }
        path.push(mask);
        let theirs = self.game.config.structure(choice.side.other()).size(choice.sort);
        for d in 0..theirs {
            let pair = pair_of(choice.side, choice.sort, choice.elem, d);
            let child = mask | 1u128 << self.game.dist.pair_index(pair);
            self.spoiler(&beta, child, depth - 1, path)?;
        }
        path.pop();
        Ok(())
    }
}

impl Game {
    /// Checks `cert` against every play of at most `unroll_depth` rounds in
    /// which its owner follows it.
    pub fn verify_strategy(&self, cert: &StrategyCertificate, unroll_depth: usize) -> Verification {
        let mut walk = Walk { game: self, cert, checked: 0, explored: HashMap::new() };
        let result = match cert.player {
            Player::II => {
                if self.r0_lost(0) {
                    Err("r0 at the empty position is not below epsilon".to_string())
                } else {
                    walk.duplicator(&ClockValue::Top, 0, unroll_depth)
                }
            }
            Player::I => walk.spoiler(&ClockValue::Top, 0, unroll_depth, &mut Vec::new()),
        };
        Verification { ok: result.is_ok(), violation: result.err(), positions_checked: walk.checked }
    }
}
