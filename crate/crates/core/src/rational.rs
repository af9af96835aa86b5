//! Exact rationals with the `"p/q"` wire format.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An arbitrary-precision rational number.
///
/// Serialized as the string `"p/q"` with `q > 0` and `gcd(p, q) = 1`; the
/// denominator is always written, so `1` is `"1/1"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Truncated subtraction `self ∸ other = max(self - other, 0)`.
    pub fn monus(&self, other: &Rational) -> Self {
        let d = &self.0 - &other.0;
        if d.is_negative() {
            Rational::zero()
        } else {
            Rational(d)
        }
    }

    /// `|self - other|`.
    pub fn dist(&self, other: &Rational) -> Self {
        Rational((&self.0 - &other.0).abs())
    }

    pub fn midpoint(&self, other: &Rational) -> Self {
        Rational((&self.0 + &other.0) / BigInt::from(2))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    /// Parses `"p/q"` (reduced, `q > 0`) or a bare integer `"p"`.
    pub fn parse_lenient(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.contains('/') {
            s.parse()
        } else {
            let n: BigInt = s
                .parse()
                .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
            Ok(Rational(BigRational::from_integer(n)))
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Strict parser: requires `"p/q"` with `q > 0` and the fraction reduced.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid rational {s:?}, expected reduced \"p/q\""));
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        if p.is_empty() || q.is_empty() || q.starts_with(['+', '-']) || p.starts_with('+') {
            return Err(bad());
        }
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if !q.is_positive() {
            return Err(bad());
        }
        let r = BigRational::new(p.clone(), q.clone());
        if r.numer() != &p || r.denom() != &q {
            return Err(bad());
        }
        Ok(Rational(r))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strict_parse_rejects_non_canonical() {
        assert!("2/4".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("3".parse::<Rational>().is_err());
        assert!("+1/2".parse::<Rational>().is_err());
        assert_eq!("-3/2".parse::<Rational>().unwrap(), Rational::new(-3, 2));
        assert_eq!("0/1".parse::<Rational>().unwrap(), Rational::zero());
    }

    #[test]
    fn lenient_accepts_integers() {
        assert_eq!(Rational::parse_lenient("3").unwrap(), Rational::from_integer(3));
        assert_eq!(Rational::parse_lenient("1/2").unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn monus_and_midpoint() {
        let half = Rational::new(1, 2);
        assert_eq!(Rational::one().monus(&half), half);
        assert_eq!(half.monus(&Rational::one()), Rational::zero());
        assert_eq!(Rational::zero().midpoint(&Rational::one()), half);
    }

    proptest! {
        #[test]
        fn wire_format_round_trips(p in -10_000i64..10_000, q in 1i64..10_000) {
            let r = Rational::new(p, q);
            let s = r.to_string();
            let back: Rational = s.parse().unwrap();
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(back.to_string(), s);
        }
    }
}
