use std::collections::{BTreeSet, VecDeque};

use super::certificate::{room_of, ChallengeChoice, Room, StrategyCertificate};
use super::{Game, Player};
use crate::bnf::Challenge;
use crate::clocks::{ClockOrder, ClockValue, Cnf, Rank};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub winner: Player,
    /// `αstar`, when the structures are small enough to compute it.
    pub stabilization_rank: Option<u64>,
    /// The distance at the empty position for the rank of the whole clock.
    pub deciding_value: Rational,
    pub certificate: StrategyCertificate,
}

impl Game {
    fn is_omega_star(&self) -> bool {
        matches!(self.config.clock, ClockOrder::OmegaStar)
    }

    pub(crate) fn cap(&self) -> Option<u64> {
        self.dist.alpha_star().map(|a| a + 1)
    }

    pub fn room(&self, value: &ClockValue) -> Result<Room> {
        room_of(&self.config.clock, self.cap(), value)
    }

    pub(crate) fn dist_index(&self, room: Room, mask: u128) -> Result<u32> {
        match room {
            Room::Rank(k) => Ok(self.dist.r_index(k, mask)),
            Room::Star => self.dist.rank_index(Rank::Infinite, mask),
        }
    }

    /// The least lattice index whose value is at least ε.
    pub(crate) fn eps_index(&self) -> u32 {
        self.dist.lattice().partition_point(|v| *v < self.config.epsilon) as u32
    }

    pub(crate) fn r0_lost(&self, mask: u128) -> bool {
        self.dist.r0_index(mask) >= self.eps_index()
    }

    /// Rooms the next challenge can move the clock into.
    pub(crate) fn successor_rooms(&self, room: Room) -> Vec<Room> {
        match room {
            Room::Star => vec![Room::Star],
            Room::Rank(k) if Some(k) == self.cap() => (0..=k).map(Room::Rank).collect(),
            Room::Rank(k) => (0..k).map(Room::Rank).collect(),
        }
    }

    /// Clock values below `cur`, one per reachable room, with an extra
    /// infinite value where the order has one below `cur`.
    pub(crate) fn clock_options(&self, cur: &ClockValue) -> Result<Vec<(ClockValue, Room)>> {
        let order = &self.config.clock;
        if self.is_omega_star() {
            let next = match cur {
                ClockValue::Star(k) => ClockValue::Star(k + 1),
                _ => ClockValue::Star(0),
            };
            return Ok(vec![(next, Room::Star)]);
        }
        let mut out = Vec::new();
        let limit = match (order.remaining(cur), self.cap()) {
            (Rank::Finite(k), Some(m)) => k.min(m + 1),
            (Rank::Finite(k), None) => k,
            (Rank::Infinite, Some(m)) => m + 1,
            (Rank::Infinite, None) => return Err(self.dist.too_large()),
        };
        for j in 0..limit {
            let v = order.value_of_rank(j).expect("finite rank below the clock");
            out.push((v.clone(), self.room(&v)?));
        }
        let omega = ClockValue::Ordinal(Cnf::omega_power(1));
        if order.contains(&omega) && order.cmp_values(&omega, cur).is_lt() {
            out.push((omega.clone(), self.room(&omega)?));
        }
        Ok(out)
    }

    fn min_response(&self, room: Room, mask: u128, ch: &Challenge) -> Result<u32> {
        let mut m = u32::MAX;
        for &pair in &ch.responses {
            m = m.min(self.dist_index(room, mask | 1u128 << self.dist.pair_index(pair))?);
        }
        Ok(m)
    }

    /// The least `k` with `r_k ≥ ε` at `mask`, searching up to `bound`.
    fn kappa(&self, mask: u128, bound: u64) -> Option<u64> {
        let eps = self.eps_index();
        (0..=bound).find(|&k| self.dist.r_index(k, mask) >= eps)
    }

    fn initial_room(&self) -> Result<Room> {
        self.room(&ClockValue::Top)
    }

    pub fn solve(&self) -> Result<SolveResult> {
        let room = self.initial_room()?;
        let idx = self.dist_index(room, 0)?;
        let winner = if idx < self.eps_index() { Player::II } else { Player::I };
        Ok(SolveResult {
            winner,
            stabilization_rank: self.dist.alpha_star(),
            deciding_value: self.dist.value(idx).clone(),
            certificate: self.certificate_for(winner)?,
        })
    }

    pub fn extract_strategy(&self, player: Player) -> Result<StrategyCertificate> {
        let room = self.initial_room()?;
        let idx = self.dist_index(room, 0)?;
        let winner = if idx < self.eps_index() { Player::II } else { Player::I };
        if player != winner {
            return Err(Error::NotWinner(format!(
                "player {player} has no winning strategy (r = {} against epsilon {})",
                self.dist.value(idx),
                self.config.epsilon
            )));
        }
        self.certificate_for(winner)
    }

    fn certificate_for(&self, player: Player) -> Result<StrategyCertificate> {
        match player {
            Player::II => self.duplicator_certificate(|room, mask, ch| {
                let mut best = (u32::MAX, 0);
                for (i, &pair) in ch.responses.iter().enumerate() {
                    let v = self.dist_index(room, mask | 1u128 << self.dist.pair_index(pair))?;
                    if v < best.0 {
                        best = (v, i);
                    }
                }
                Ok(best.1)
            }),
            Player::I => self.spoiler_certificate(),
        }
    }

    /// A certificate for II built by answering every challenge reachable
    /// from the start with `choose`, which returns a response index.
    pub fn duplicator_certificate(
        &self,
        mut choose: impl FnMut(Room, u128, &Challenge) -> Result<usize>,
    ) -> Result<StrategyCertificate> {
        let mut cert = StrategyCertificate::new(Player::II, self.config.clock.clone(), self.cap());
        let start = (self.initial_room()?, 0u128);
        if self.r0_lost(0) {
            return Ok(cert);
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((room, mask)) = queue.pop_front() {
            let p = self.dist.position(mask);
            for next in self.successor_rooms(room) {
                for ch in self.dist.challenges() {
                    let i = choose(next, mask, ch)?;
                    let pair = ch.responses[i];
                    let response = match ch.side {
                        crate::bnf::Side::A => pair.b,
                        crate::bnf::Side::B => pair.a,
                    };
                    cert.responses.insert((next, p.clone(), ch.side, ch.sort, ch.elem), response);
                    let child = (next, mask | 1u128 << self.dist.pair_index(pair));
                    let live = next != Room::Rank(0) && !self.r0_lost(child.1);
                    if live && seen.insert(child) {
                        queue.push_back(child);
                    }
                }
            }
        }
        Ok(cert)
    }

    /// The mirror strategy on a pair of structures with equal universes.
    pub fn copycat_certificate(&self) -> Result<StrategyCertificate> {
        let (a, b) = (&self.config.a, &self.config.b);
        if (0..a.sort_count()).any(|s| a.size(s) != b.size(s)) {
            return Err(Error::Invalid("copycat needs universes of equal size".into()));
        }
        self.duplicator_certificate(|_, _, ch| Ok(ch.elem))
    }

    fn spoiler_certificate(&self) -> Result<StrategyCertificate> {
        let mut cert = StrategyCertificate::new(Player::I, self.config.clock.clone(), self.cap());
        let eps = self.eps_index();
        let start = (self.initial_room()?, 0u128);
        if self.r0_lost(0) {
            return Ok(cert);
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((room, mask)) = queue.pop_front() {
            let bound = match room {
                Room::Rank(k) => k,
                Room::Star => self.dist.alpha_star().ok_or_else(|| self.dist.too_large())?,
            };
            let kappa = self
                .kappa(mask, bound)
                .ok_or_else(|| Error::Invalid("spoiler certificate reached a position it does not win".into()))?;
            let rank = kappa - 1;
            let next = if room == Room::Star { Room::Star } else { Room::Rank(rank) };
            let mut chosen = None;
            for ch in self.dist.challenges() {
                if self.min_response(Room::Rank(rank), mask, ch)? >= eps {
                    chosen = Some(ch);
                    break;
                }
            }
            let ch = chosen.expect("r_(k+1) >= eps has a witnessing challenge");
            cert.challenges.insert(
                (room, self.dist.position(mask)),
                ChallengeChoice { rank, side: ch.side, sort: ch.sort, elem: ch.elem },
            );
            for &pair in &ch.responses {
                let child = (next, mask | 1u128 << self.dist.pair_index(pair));
                if !self.r0_lost(child.1) && seen.insert(child) {
                    queue.push_back(child);
                }
            }
        }
        Ok(cert)
    }
}
