//! Built-in languages.
//!
//! `metric`, `graph` and `chain` are the working fixtures for games and
//! distances. `ous` and `cstar` are declaration-only: finitely many ball
//! sorts `B1..B4` of the order-unit-space and C*-algebra languages, used to
//! exercise multi-sorted validation.

use super::{ConstantDecl, FunctionDecl, LinearModulus, MetricLanguage, RelationDecl, SortDecl};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const FIXTURE_NAMES: [&str; 5] = ["metric", "graph", "chain", "ous", "cstar"];

const BALLS: i64 = 4;

pub fn fixture(name: &str) -> Result<MetricLanguage> {
    match name {
        "metric" => Ok(metric()),
        "graph" => Ok(binary_relational("V", "E")),
        "chain" => Ok(binary_relational("C", "le")),
        "ous" => Ok(ous()),
        "cstar" => Ok(cstar()),
        other => Err(Error::Unknown { kind: "fixture", name: other.into() }),
    }
}

fn metric() -> MetricLanguage {
    MetricLanguage {
        sorts: vec![SortDecl { name: "M".into(), diameter: Rational::from(2) }],
        ..Default::default()
    }
}

/// One sort with discrete metric (diameter 1) and a single 0/1-valued binary
/// relation, read with the convention that value 0 means "holds".
fn binary_relational(sort: &str, rel: &str) -> MetricLanguage {
    MetricLanguage {
        sorts: vec![SortDecl { name: sort.into(), diameter: Rational::one() }],
        relations: vec![RelationDecl {
            name: rel.into(),
            args: vec![sort.into(), sort.into()],
            interval: [Rational::zero(), Rational::one()],
            modulus: LinearModulus::unit(2),
        }],
        ..Default::default()
    }
}

fn ball(n: i64) -> String {
    format!("B{n}")
}

fn ball_sorts() -> Vec<SortDecl> {
    (1..=BALLS)
        .map(|n| SortDecl { name: ball(n), diameter: Rational::from(2 * n) })
        .collect()
}

fn func(name: String, args: &[i64], result: i64, coeffs: Vec<Rational>) -> FunctionDecl {
    FunctionDecl {
        name,
        args: args.iter().map(|&n| ball(n)).collect(),
        result: ball(result),
        modulus: LinearModulus::new(coeffs),
    }
}

/// Scalars available for scalar multiplication, with their display tags.
fn scalars() -> Vec<(Rational, &'static str)> {
    vec![
        (Rational::from(-1), "neg"),
        (Rational::new(1, 2), "half"),
        (Rational::from(2), "two"),
    ]
}

/// `⌈|λ| n⌉`.
fn scaled_ball(lambda: &Rational, n: i64) -> i64 {
    let v = &lambda.abs() * &Rational::from(n);
    let (p, q) = (v.numer().clone(), v.denom().clone());
    let ceil = (p + &q - num_bigint::BigInt::from(1)) / q;
    i64::try_from(ceil).expect("small scalar")
}

fn linear_functions(functions: &mut Vec<FunctionDecl>) {
    for n in 1..=BALLS {
        if 2 * n <= BALLS {
            functions.push(func(format!("add_{n}"), &[n, n], 2 * n, vec![Rational::one(); 2]));
        }
        for (lambda, tag) in scalars() {
            let m = scaled_ball(&lambda, n);
            if (1..=BALLS).contains(&m) {
                functions.push(func(format!("smul_{tag}_{n}"), &[n], m, vec![lambda.abs()]));
            }
        }
        for m in (n + 1)..=BALLS {
            functions.push(func(format!("incl_{n}_{m}"), &[n], m, vec![Rational::one()]));
        }
    }
}

fn ous() -> MetricLanguage {
    let mut functions = Vec::new();
    linear_functions(&mut functions);
    let relations = (1..=BALLS)
        .map(|n| RelationDecl {
            name: format!("P_{n}"),
            args: vec![ball(n)],
            interval: [Rational::zero(), Rational::from(n)],
            modulus: LinearModulus::unit(1),
        })
        .collect();
    MetricLanguage {
        sorts: ball_sorts(),
        relations,
        functions,
        constants: vec![
            ConstantDecl { name: "zero".into(), sort: ball(1) },
            ConstantDecl { name: "one".into(), sort: ball(1) },
        ],
    }
}

fn cstar() -> MetricLanguage {
    let mut functions = Vec::new();
    linear_functions(&mut functions);
    for n in 1..=BALLS {
        functions.push(func(format!("star_{n}"), &[n], n, vec![Rational::one()]));
        if n * n <= BALLS {
            // ‖xy − x'y'‖ ≤ n‖x − x'‖ + n‖y − y'‖ on the ball of radius n.
            functions.push(func(format!("mul_{n}"), &[n, n], n * n, vec![Rational::from(n); 2]));
        }
    }
    MetricLanguage {
        sorts: ball_sorts(),
        relations: Vec::new(),
        functions,
        constants: vec![ConstantDecl { name: "zero".into(), sort: ball(1) }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_and_chain_shapes() {
        let g = fixture("graph").unwrap();
        assert_eq!(g.sorts.len(), 1);
        assert_eq!(g.sorts[0].diameter, Rational::one());
        assert_eq!(g.relations[0].interval, [Rational::zero(), Rational::one()]);
        assert_eq!(g.relations[0].modulus, LinearModulus::unit(2));
        let c = fixture("chain").unwrap();
        assert_eq!(c.relations[0].name, "le");
    }

    #[test]
    fn cstar_has_ball_sorts_and_operations() {
        let c = fixture("cstar").unwrap();
        let sorts: Vec<_> = c.sorts.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(sorts, ["B1", "B2", "B3", "B4"]);
        for name in ["add_1", "add_2", "mul_1", "mul_2", "star_3", "smul_two_2", "smul_half_3", "incl_1_4"] {
            assert!(c.function(name).is_some(), "missing {name}");
        }
        assert!(c.function("add_3").is_none());
        assert_eq!(c.function("smul_half_3").unwrap().result, "B2");
        assert_eq!(c.function("mul_2").unwrap().result, "B4");
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(fixture("nope"), Err(Error::Unknown { .. })));
    }
}
