//! Game clocks: finite orders, ordinals below ω^ω in Cantor normal form, and ω*.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An ordinal below ω^ω as `ω^e₁·c₁ + … + ω^eₖ·cₖ` with `e₁ > … > eₖ` and
/// every `cᵢ > 0`. The empty sum is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cnf {
    terms: Vec<(u32, u64)>,
}

impl Cnf {
    pub fn new(mut terms: Vec<(u32, u64)>) -> Result<Self> {
        terms.retain(|&(_, c)| c > 0);
        if terms.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(Error::Parse("exponents must be strictly decreasing".into()));
        }
        Ok(Cnf { terms })
    }

    pub fn zero() -> Self {
        Cnf::default()
    }

    pub fn finite(k: u64) -> Self {
        Cnf { terms: if k == 0 { vec![] } else { vec![(0, k)] } }
    }

    pub fn omega_power(e: u32) -> Self {
        Cnf { terms: vec![(e, 1)] }
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, k)] => Some(*k),
            _ => None,
        }
    }
}

impl Ord for Cnf {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            match a.0.cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Cnf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Cnf {
    type Err = Error;

    /// Parses sums of `w^e*c`, `w^e`, `w*c`, `w` and `c`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed ordinal {s:?}"));
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        let mut terms = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (base, coeff) = match part.split_once('*') {
                Some((b, c)) => (b.trim(), num(c)?),
                None => (part, 1),
            };
            let exp = if let Some(e) = base.strip_prefix("w^") {
                u32::try_from(num(e)?).map_err(|_| bad())?
            } else if base == "w" {
                1
            } else if part.contains('*') {
                return Err(bad());
            } else {
                terms.push((0, num(base)?));
                continue;
            };
            terms.push((exp, coeff));
        }
        Cnf::new(terms).map_err(|_| bad())
    }
}

/// The linear order a game clock runs in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClockOrder {
    /// `{0, …, n−1}` with `n ≥ 1`.
    Finite(u64),
    /// The ordinals below the given one.
    Ordinal(Cnf),
    /// The reversed naturals `… ≺ 2′ ≺ 1′ ≺ 0′`.
    OmegaStar,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClockValue {
    /// The pre-game value, above every element.
    Top,
    Finite(u64),
    Ordinal(Cnf),
    Star(u64),
}

/// How many rounds a clock value leaves, for distance purposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Finite(u64),
    Infinite,
}

impl ClockOrder {
    /// Parses `"3"`, `"0"` (the empty ordinal), CNF strings such as
    /// `"w^2*1+w*0+5"` or `"w"`, and `"w*"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "w*" {
            return Ok(ClockOrder::OmegaStar);
        }
        if spec.contains('w') {
            return Ok(ClockOrder::Ordinal(spec.parse()?));
        }
        match spec.parse::<u64>() {
            Ok(0) => Ok(ClockOrder::Ordinal(Cnf::zero())),
            Ok(n) => Ok(ClockOrder::Finite(n)),
            Err(_) => Err(Error::Parse(format!("malformed clock {spec:?}"))),
        }
    }

    pub fn contains(&self, v: &ClockValue) -> bool {
        match (self, v) {
            (_, ClockValue::Top) => true,
            (ClockOrder::Finite(n), ClockValue::Finite(k)) => k < n,
            (ClockOrder::Ordinal(a), ClockValue::Ordinal(b)) => b < a,
            (ClockOrder::OmegaStar, ClockValue::Star(_)) => true,
            _ => false,
        }
    }

    /// Parses a clock value in this order: an integer, a CNF string, or
    /// `"top"`/`"∞"`.
    pub fn parse_value(&self, s: &str) -> Result<ClockValue> {
        let s = s.trim();
        if s == "top" || s == "∞" {
            return Ok(ClockValue::Top);
        }
        let bad = || Error::Parse(format!("malformed clock value {s:?}"));
        let v = match self {
            ClockOrder::Finite(_) => ClockValue::Finite(s.parse().map_err(|_| bad())?),
            ClockOrder::Ordinal(_) => ClockValue::Ordinal(s.parse()?),
            ClockOrder::OmegaStar => ClockValue::Star(s.trim_end_matches('\'').parse().map_err(|_| bad())?),
        };
        if !self.contains(&v) {
            return Err(Error::Invalid(format!("clock value {v} is not in {self}")));
        }
        Ok(v)
    }

    /// The order's element with `k` elements strictly below it, if any.
    pub fn value_of_rank(&self, k: u64) -> Option<ClockValue> {
        let v = match self {
            ClockOrder::Finite(_) => ClockValue::Finite(k),
            ClockOrder::Ordinal(_) => ClockValue::Ordinal(Cnf::finite(k)),
            ClockOrder::OmegaStar => return None,
        };
        self.contains(&v).then_some(v)
    }

    /// Order type of the elements below `v`, when it is finite.
    pub fn remaining(&self, v: &ClockValue) -> Rank {
        match (self, v) {
            (ClockOrder::Finite(n), ClockValue::Top) => Rank::Finite(*n),
            (ClockOrder::Ordinal(a), ClockValue::Top) => a.as_finite().map_or(Rank::Infinite, Rank::Finite),
            (_, ClockValue::Finite(k)) => Rank::Finite(*k),
            (_, ClockValue::Ordinal(b)) => b.as_finite().map_or(Rank::Infinite, Rank::Finite),
            (_, _) => Rank::Infinite,
        }
    }

    pub fn cmp_values(&self, a: &ClockValue, b: &ClockValue) -> Ordering {
        match (a, b) {
            (ClockValue::Top, ClockValue::Top) => Ordering::Equal,
            (ClockValue::Top, _) => Ordering::Greater,
            (_, ClockValue::Top) => Ordering::Less,
            (ClockValue::Finite(x), ClockValue::Finite(y)) => x.cmp(y),
            (ClockValue::Ordinal(x), ClockValue::Ordinal(y)) => x.cmp(y),
            (ClockValue::Star(x), ClockValue::Star(y)) => y.cmp(x),
            _ => panic!("clock values from different orders"),
        }
    }
}

impl fmt::Display for ClockOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockOrder::Finite(n) => write!(f, "{n}"),
            ClockOrder::Ordinal(a) => write!(f, "{a}"),
            ClockOrder::OmegaStar => write!(f, "w*"),
        }
    }
}

impl fmt::Display for ClockValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockValue::Top => write!(f, "∞"),
            ClockValue::Finite(k) | ClockValue::Star(k) => write!(f, "{k}"),
            ClockValue::Ordinal(a) => write!(f, "{a}"),
        }
    }
}

impl Serialize for ClockOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ClockOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ClockOrder::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn check_member(order: &ClockOrder, v: &ClockValue) -> Result<()> {
    if order.contains(v) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("clock value {v} is not in {order}")))
    }
}

/// Whether `proposed ≺ current` in `order`.
pub fn legal_decrement(order: &ClockOrder, current: &ClockValue, proposed: &ClockValue) -> Result<bool> {
    if *proposed == ClockValue::Top {
        return Err(Error::Invalid("the clock cannot be set to the top value".into()));
    }
    check_member(order, current)?;
    check_member(order, proposed)?;
    Ok(order.cmp_values(proposed, current) == Ordering::Less)
}

/// Whether no legal decrement exists from `value`.
pub fn is_minimum(order: &ClockOrder, value: &ClockValue) -> bool {
    match (order, value) {
        (ClockOrder::OmegaStar, _) => false,
        (ClockOrder::Finite(_), ClockValue::Top) => false,
        (ClockOrder::Ordinal(a), ClockValue::Top) => a.is_zero(),
        (_, ClockValue::Finite(0)) => true,
        (_, ClockValue::Ordinal(b)) => b.is_zero(),
        _ => false,
    }
}

pub fn is_well_order(order: &ClockOrder) -> bool {
    !matches!(order, ClockOrder::OmegaStar)
}

/// The rank at which distances are read for `value`: finite values are
/// capped at the stabilization rank; infinite values, `Top` and ω* values
/// read the stabilized distance.
pub fn effective_rank(_order: &ClockOrder, value: &ClockValue, alpha_star: u64) -> Rank {
    match value {
        ClockValue::Finite(k) => Rank::Finite((*k).min(alpha_star)),
        ClockValue::Ordinal(b) => b.as_finite().map_or(Rank::Infinite, |k| Rank::Finite(k.min(alpha_star))),
        ClockValue::Top | ClockValue::Star(_) => Rank::Infinite,
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn val(order: &ClockOrder, s: &str) -> ClockValue {
        order.parse_value(s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(ClockOrder::parse("3").unwrap(), ClockOrder::Finite(3));
        assert_eq!(ClockOrder::parse("w*").unwrap(), ClockOrder::OmegaStar);
        let o = ClockOrder::parse("w^2*1+w*0+5").unwrap();
        assert_eq!(o, ClockOrder::Ordinal(Cnf::new(vec![(2, 1), (0, 5)]).unwrap()));
        assert_eq!(o.to_string(), "w^2+5");
        assert_eq!(ClockOrder::parse("w").unwrap().to_string(), "w");
        assert_eq!(ClockOrder::parse("0").unwrap(), ClockOrder::Ordinal(Cnf::zero()));
        assert!(ClockOrder::parse("w+w^2").is_err());
        assert!(ClockOrder::parse("x").is_err());
        assert_eq!("w^2+w*2".parse::<Cnf>().unwrap().to_string(), "w^2+w*2");
    }

    #[test]
    fn decrement_examples() {
        let w = ClockOrder::parse("w").unwrap();
        assert!(legal_decrement(&w, &ClockValue::Top, &val(&w, "5")).unwrap());
        assert!(!legal_decrement(&w, &val(&w, "3"), &val(&w, "3")).unwrap());
        let s = ClockOrder::OmegaStar;
        assert!(legal_decrement(&s, &ClockValue::Star(2), &ClockValue::Star(7)).unwrap());
        assert!(!legal_decrement(&s, &ClockValue::Star(7), &ClockValue::Star(2)).unwrap());
        assert!(legal_decrement(&w, &val(&w, "3"), &ClockValue::Ordinal(Cnf::omega_power(1))).is_err());
        assert!(legal_decrement(&ClockOrder::Finite(2), &ClockValue::Top, &ClockValue::Finite(2)).is_err());
    }

    #[test]
    fn minimum_examples() {
        let o = ClockOrder::parse("w+1").unwrap();
        assert!(is_minimum(&o, &val(&o, "0")));
        assert!(!is_minimum(&ClockOrder::OmegaStar, &ClockValue::Star(4)));
        assert!(is_minimum(&ClockOrder::Finite(4), &ClockValue::Finite(0)));
        assert!(is_minimum(&ClockOrder::parse("0").unwrap(), &ClockValue::Top));
    }

    #[test]
    fn well_orders() {
        assert!(is_well_order(&ClockOrder::Finite(3)));
        assert!(is_well_order(&ClockOrder::parse("w^2+w*2").unwrap()));
        assert!(!is_well_order(&ClockOrder::OmegaStar));
    }

    #[test]
    fn effective_rank_examples() {
        let w = ClockOrder::parse("w").unwrap();
        assert_eq!(effective_rank(&w, &val(&w, "2"), 5), Rank::Finite(2));
        let w2 = ClockOrder::parse("w^2").unwrap();
        assert_eq!(effective_rank(&w2, &val(&w2, "w*3"), 4), Rank::Infinite);
        assert_eq!(effective_rank(&ClockOrder::Finite(10), &ClockValue::Finite(9), 3), Rank::Finite(3));
    }

    fn arb_cnf() -> impl Strategy<Value = Cnf> {
        prop::collection::btree_map(0u32..4, 1u64..4, 0..4).prop_map(|m| {
            Cnf::new(m.into_iter().rev().collect()).unwrap()
        })
    }

    /// A random ordinal strictly below `c`, with small coefficients.
    fn below(c: &Cnf, rng: &mut impl FnMut(u64) -> u64) -> Cnf {
        let terms = c.terms();
        let i = rng(terms.len() as u64) as usize;
        let (e, k) = terms[i];
        let mut out = terms[..i].to_vec();
        out.push((e, rng(k)));
        for lower in (0..e).rev() {
            out.push((lower, rng(3)));
        }
        Cnf::new(out).unwrap()
    }

    proptest! {
        #[test]
        fn cnf_display_round_trips(c in arb_cnf()) {
            prop_assert_eq!(c.to_string().parse::<Cnf>().unwrap(), c);
        }

        #[test]
        fn decrement_is_a_strict_order(a in arb_cnf(), b in arb_cnf(), c in arb_cnf()) {
            let order = ClockOrder::parse("w^4").unwrap();
            let (a, b, c) = (ClockValue::Ordinal(a), ClockValue::Ordinal(b), ClockValue::Ordinal(c));
            prop_assert!(!legal_decrement(&order, &a, &a).unwrap());
            if legal_decrement(&order, &a, &b).unwrap() && legal_decrement(&order, &b, &c).unwrap() {
                prop_assert!(legal_decrement(&order, &a, &c).unwrap());
            }
            let (x, y, z) = (a.clone(), b.clone(), c.clone());
            let star = ClockOrder::OmegaStar;
            let s = |v: &ClockValue| match v { ClockValue::Ordinal(c) => ClockValue::Star(c.terms().len() as u64), _ => unreachable!() };
            prop_assert!(!legal_decrement(&star, &s(&x), &s(&x)).unwrap());
            if legal_decrement(&star, &s(&x), &s(&y)).unwrap() && legal_decrement(&star, &s(&y), &s(&z)).unwrap() {
                prop_assert!(legal_decrement(&star, &s(&x), &s(&z)).unwrap());
            }
        }

        #[test]
        fn greedy_descent_terminates(start in arb_cnf(), seed in any::<u64>()) {
            let mut state = seed | 1;
            let mut rng = |n: u64| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                if n == 0 { 0 } else { state % n }
            };
            let order = ClockOrder::parse("w^4").unwrap();
            let mut current = ClockValue::Ordinal(start);
            let mut steps = 0;
            while !is_minimum(&order, &current) {
                let ClockValue::Ordinal(c) = &current else { unreachable!() };
                let next = ClockValue::Ordinal(below(c, &mut rng));
                prop_assert!(legal_decrement(&order, &current, &next).unwrap());
                current = next;
                steps += 1;
                prop_assert!(steps < 100_000);
            }
        }

        #[test]
        fn omega_star_descends_forever(k in 0u64..1_000_000) {
            let order = ClockOrder::OmegaStar;
            prop_assert!(legal_decrement(&order, &ClockValue::Star(k), &ClockValue::Star(k + 1)).unwrap());
            prop_assert!(!is_minimum(&order, &ClockValue::Star(k + 1)));
        }
    }
}
