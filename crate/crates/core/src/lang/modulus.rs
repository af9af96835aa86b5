//! Linear moduli of continuity and weak moduli.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A linear modulus `Δ(δ) = Σ λ_i δ_i`, one coefficient per argument position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct LinearModulus {
    pub coefficients: Vec<Rational>,
}

impl LinearModulus {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        LinearModulus { coefficients }
    }

    /// The modulus `(1, ..., 1)` of the given arity.
    pub fn unit(arity: usize) -> Self {
        LinearModulus { coefficients: vec![Rational::one(); arity] }
    }

    pub fn arity(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficient(&self, i: usize) -> Rational {
        self.coefficients.get(i).cloned().unwrap_or_default()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coefficients.iter().all(|c| !c.is_negative())
    }

    /// Evaluates `Σ λ_i δ_i`.
    pub fn apply(&self, deltas: &[Rational]) -> Result<Rational> {
        if deltas.len() != self.coefficients.len() {
            return Err(Error::LengthMismatch { expected: self.coefficients.len(), got: deltas.len() });
        }
        Ok(self.coefficients.iter().zip(deltas).map(|(c, d)| c * d).sum())
    }
}

/// How a weak modulus continues past its explicit prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailRule {
    /// `c_i = value` for every `i` past the prefix.
    Constant(Rational),
    /// `c_i = slope * i + intercept`, with `i` the zero-based index.
    Affine { slope: Rational, intercept: Rational },
}

/// A weak modulus `Ω(δ) = Σ_i c_i δ_i` given by a finite prefix of
/// coefficients and a closed-form tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeakModulus {
    #[serde(default)]
    pub prefix: Vec<Rational>,
    pub tail: TailRule,
}

impl Default for WeakModulus {
    /// `c_i = 1` for all `i`.
    fn default() -> Self {
        WeakModulus { prefix: Vec::new(), tail: TailRule::Constant(Rational::one()) }
    }
}

impl WeakModulus {
    pub fn new(prefix: Vec<Rational>, tail: TailRule) -> Result<Self> {
        let m = WeakModulus { prefix, tail };
        m.check()?;
        Ok(m)
    }

    pub fn constant(c: Rational) -> Result<Self> {
        Self::new(Vec::new(), TailRule::Constant(c))
    }

    fn check(&self) -> Result<()> {
        if self.prefix.iter().any(Rational::is_negative) {
            return Err(Error::Invalid("weak modulus coefficients must be non-negative".into()));
        }
        match &self.tail {
            TailRule::Constant(c) if c.is_negative() => {
                Err(Error::Invalid("weak modulus tail must be non-negative".into()))
            }
            TailRule::Affine { slope, intercept } => {
                // Non-negative for every index iff both the first tail entry and the slope are.
                let first = slope * &Rational::from(self.prefix.len() as i64) + intercept.clone();
                if slope.is_negative() || first.is_negative() {
                    Err(Error::Invalid("affine tail must stay non-negative".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// The coefficient `c_i` (zero-based).
    pub fn coefficient(&self, i: usize) -> Rational {
        if let Some(c) = self.prefix.get(i) {
            return c.clone();
        }
        match &self.tail {
            TailRule::Constant(c) => c.clone(),
            TailRule::Affine { slope, intercept } => slope * &Rational::from(i as i64) + intercept.clone(),
        }
    }

    /// The truncation `Ω|_n` as a linear modulus.
    pub fn truncation(&self, n: usize) -> LinearModulus {
        LinearModulus::new((0..n).map(|i| self.coefficient(i)).collect())
    }

    /// Parses the CLI form: `default`, a comma list `1,2,3` (last entry
    /// repeats), or `affine:SLOPE,INTERCEPT`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "default" {
            return Ok(Self::default());
        }
        if let Some(rest) = spec.strip_prefix("affine:") {
            let parts: Vec<_> = rest.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("affine modulus needs two values, got {rest:?}")));
            }
            return Self::new(
                Vec::new(),
                TailRule::Affine {
                    slope: Rational::parse_lenient(parts[0])?,
                    intercept: Rational::parse_lenient(parts[1])?,
                },
            );
        }
        let mut values = spec
            .split(',')
            .map(Rational::parse_lenient)
            .collect::<Result<Vec<_>>>()?;
        let last = values.pop().ok_or_else(|| Error::Parse("empty modulus".into()))?;
        Self::new(values, TailRule::Constant(last))
    }
}

/// `Ω|_n(δ) = Σ_{i<n} c_i δ_i`, computed exactly.
pub fn omega_truncate(omega: &WeakModulus, n: usize, deltas: &[Rational]) -> Result<Rational> {
    if deltas.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: deltas.len() });
    }
    if deltas.iter().any(Rational::is_negative) {
        return Err(Error::Invalid("distances must be non-negative".into()));
    }
    omega.truncation(n).apply(deltas)
}

/// Coefficientwise `small ≤ big`, the shorter side padded with zeros.
pub fn modulus_dominates(big: &LinearModulus, small: &LinearModulus) -> bool {
    let n = big.arity().max(small.arity());
    (0..n).all(|i| small.coefficient(i) <= big.coefficient(i))
}

/// Whether a bag of per-slot coefficients fits under `Ω` after the slots are
/// placed optimally: the non-zero coefficients sorted in descending order
/// must be dominated by the first `k` coefficients of `Ω`, also sorted
/// descending, where `k` is the number of non-zero coefficients.
pub fn multiset_admissible(omega: &WeakModulus, coefficients: &[Rational]) -> bool {
    let mut used: Vec<&Rational> = coefficients.iter().filter(|c| !c.is_zero()).collect();
    used.sort_by(|a, b| b.cmp(a));
    let mut bound: Vec<Rational> = (0..used.len()).map(|i| omega.coefficient(i)).collect();
    bound.sort_by(|a, b| b.cmp(a));
    used.iter().zip(&bound).all(|(c, b)| *c <= b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn lm(v: &[i64]) -> LinearModulus {
        LinearModulus::new(v.iter().map(|&x| Rational::from(x)).collect())
    }

    #[test]
    fn domination_examples() {
        let omega = WeakModulus::default();
        assert!(modulus_dominates(&omega.truncation(2), &lm(&[1, 1])));
        assert!(!modulus_dominates(&omega.truncation(2), &lm(&[2, 0])));
        let omega = WeakModulus::new(vec![q(1, 1), q(2, 1), q(3, 1)], TailRule::Constant(q(3, 1))).unwrap();
        assert!(modulus_dominates(&omega.truncation(3), &lm(&[1, 0, 3])));
    }

    #[test]
    fn truncation_examples() {
        let omega = WeakModulus::default();
        assert_eq!(omega_truncate(&omega, 2, &[q(1, 2), q(1, 3)]).unwrap(), q(5, 6));
        assert_eq!(omega_truncate(&omega, 3, &vec![q(0, 1); 3]).unwrap(), Rational::zero());
        let affine = WeakModulus::new(
            Vec::new(),
            TailRule::Affine { slope: q(1, 1), intercept: q(1, 1) },
        )
        .unwrap();
        assert_eq!(omega_truncate(&affine, 3, &vec![q(1, 1); 3]).unwrap(), q(6, 1));
        assert!(matches!(
            omega_truncate(&affine, 3, &vec![q(1, 1); 2]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn spec_strings() {
        assert_eq!(WeakModulus::parse_spec("default").unwrap(), WeakModulus::default());
        let m = WeakModulus::parse_spec("1,2,3").unwrap();
        assert_eq!(m.coefficient(0), q(1, 1));
        assert_eq!(m.coefficient(7), q(3, 1));
        let a = WeakModulus::parse_spec("affine:1,1").unwrap();
        assert_eq!(a.coefficient(2), q(3, 1));
        assert!(WeakModulus::parse_spec("-1").is_err());
    }

    #[test]
    fn multiset_rule() {
        let omega = WeakModulus::default();
        assert!(multiset_admissible(&omega, &[q(1, 1), q(1, 1)]));
        assert!(!multiset_admissible(&omega, &[q(2, 1)]));
        assert!(multiset_admissible(&omega, &[]));
        let grow = WeakModulus::parse_spec("affine:1,1").unwrap();
        // Slots (2, 1) fit under the sorted prefix (2, 1).
        assert!(multiset_admissible(&grow, &[q(1, 1), q(2, 1)]));
        assert!(!multiset_admissible(&grow, &[q(2, 1), q(2, 1)]));
    }

    #[test]
    fn domination_is_a_partial_order() {
        let ms: Vec<LinearModulus> = [[0, 0], [1, 0], [0, 1], [1, 1], [2, 1]].iter().map(|v| lm(v)).collect();
        for a in &ms {
            assert!(modulus_dominates(a, a));
            for b in &ms {
                if modulus_dominates(a, b) && modulus_dominates(b, a) {
                    assert_eq!(a, b);
                }
                for c in &ms {
                    if modulus_dominates(a, b) && modulus_dominates(b, c) {
                        assert!(modulus_dominates(a, c));
                    }
                }
            }
        }
    }
}
