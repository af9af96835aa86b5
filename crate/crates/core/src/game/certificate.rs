//! Finite quotient representation of strategies: the play so far is
//! summarized by its canonical position and the room of the clock.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Player;
use crate::bnf::{CanonicalPosition, Side};
use crate::clocks::{ClockOrder, ClockValue, Rank};
use crate::error::{Error, Result};

/// The distance rank a clock value stands for.
///
/// On a well-ordered clock the room of a value is the order type below it,
/// capped at `αstar + 1` when the stabilization rank is known; every value
/// of an ω* clock is in the single room `Star`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Room {
    Rank(u64),
    Star,
}

impl fmt::Display for Room {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Room::Rank(k) => write!(f, "{k}"),
            Room::Star => write!(f, "*"),
        }
    }
}

impl FromStr for Room {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "*" => Ok(Room::Star),
            _ => s.parse().map(Room::Rank).map_err(|_| Error::Parse(format!("malformed room {s:?}"))),
        }
    }
}

impl Serialize for Room {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Room {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The room of a clock value under `cap`.
pub(crate) fn room_of(order: &ClockOrder, cap: Option<u64>, value: &ClockValue) -> Result<Room> {
    if matches!(order, ClockOrder::OmegaStar) {
        return Ok(Room::Star);
    }
    match (order.remaining(value), cap) {
        (Rank::Finite(k), Some(m)) => Ok(Room::Rank(k.min(m))),
        (Rank::Finite(k), None) => Ok(Room::Rank(k)),
        (Rank::Infinite, Some(m)) => Ok(Room::Rank(m)),
        (Rank::Infinite, None) => {
            Err(Error::TooLarge("an infinite clock value needs the stabilization rank".into()))
        }
    }
}

/// A spoiler move prescribed by a certificate for player I.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChallengeChoice {
    /// The room the clock is set into; on an ω* clock, the number of rounds
    /// after this one that the strategy still needs.
    pub rank: u64,
    pub side: Side,
    pub sort: usize,
    pub elem: usize,
}

pub(crate) type ResponseKey = (Room, CanonicalPosition, Side, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyCertificate {
    pub player: Player,
    pub clock: ClockOrder,
    /// `αstar + 1`, when known.
    pub cap: Option<u64>,
    /// For II: (room of the challenge clock, position before the round,
    /// challenged side, sort, element) to the response element.
    pub responses: BTreeMap<ResponseKey, usize>,
    /// For I: (room of the current clock, position) to the next challenge.
    pub challenges: BTreeMap<(Room, CanonicalPosition), ChallengeChoice>,
}

impl StrategyCertificate {
    pub(crate) fn new(player: Player, clock: ClockOrder, cap: Option<u64>) -> Self {
        StrategyCertificate { player, clock, cap, responses: BTreeMap::new(), challenges: BTreeMap::new() }
    }

    pub fn room_of(&self, value: &ClockValue) -> Result<Room> {
        room_of(&self.clock, self.cap, value)
    }

    pub fn response(&self, room: Room, p: &CanonicalPosition, side: Side, sort: usize, elem: usize) -> Option<usize> {
        self.responses.get(&(room, p.clone(), side, sort, elem)).copied()
    }

    pub fn challenge(&self, room: Room, p: &CanonicalPosition) -> Option<&ChallengeChoice> {
        self.challenges.get(&(room, p.clone()))
    }

    /// Number of recorded entries.
    pub fn len(&self) -> usize {
        self.responses.len() + self.challenges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ResponseEntry {
    room: Room,
    position: CanonicalPosition,
    side: Side,
    sort: usize,
    elem: usize,
    response: usize,
}

#[derive(Serialize, Deserialize)]
struct ChallengeEntry {
    room: Room,
    position: CanonicalPosition,
    #[serde(flatten)]
    choice: ChallengeChoice,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    player: Player,
    clock: ClockOrder,
    #[serde(default)]
    cap: Option<u64>,
    #[serde(default)]
    responses: Vec<ResponseEntry>,
    #[serde(default)]
    challenges: Vec<ChallengeEntry>,
}

impl Serialize for StrategyCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = Wire {
            player: self.player,
            clock: self.clock.clone(),
            cap: self.cap,
            responses: self
                .responses
                .iter()
                .map(|((room, position, side, sort, elem), &response)| ResponseEntry {
                    room: *room,
                    position: position.clone(),
                    side: *side,
                    sort: *sort,
                    elem: *elem,
                    response,
                })
                .collect(),
            challenges: self
                .challenges
                .iter()
                .map(|((room, position), choice)| ChallengeEntry { room: *room, position: position.clone(), choice: choice.clone() })
                .collect(),
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StrategyCertificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = Wire::deserialize(d)?;
        let mut cert = StrategyCertificate::new(wire.player, wire.clock, wire.cap);
        for e in wire.responses {
            cert.responses.insert((e.room, e.position, e.side, e.sort, e.elem), e.response);
        }
        for e in wire.challenges {
            cert.challenges.insert((e.room, e.position), e.choice);
        }
        Ok(cert)
    }
}
