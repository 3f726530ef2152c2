//! Exact rational numbers and their JSON encoding.
//!
//! Values are read from JSON as integers or as `"p/q"` strings and always
//! written back as strings, so reports survive a round trip unchanged.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat(i))
            } else {
                Err(Error::Parse(format!(
                    "non-integer number {n}; write fractions as \"p/q\""
                )))
            }
        }
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

/// Parses `{"dim": d, "entries": [[...], ...]}` into a square rational matrix.
pub fn square_matrix_from_json(v: &Value) -> Result<Vec<Vec<Rational>>> {
    let rows = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("matrix JSON needs an \"entries\" array".into()))?;
    let entries = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("matrix rows must be arrays".into()))?
                .iter()
                .map(rational_from_json)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(d) = v.get("dim").and_then(Value::as_u64) {
        if d as usize != entries.len() {
            return Err(Error::DimensionMismatch { expected: d as usize, got: entries.len() });
        }
    }
    if let Some(row) = entries.iter().find(|r| r.len() != entries.len()) {
        return Err(Error::DimensionMismatch { expected: entries.len(), got: row.len() });
    }
    Ok(entries)
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k))
}

/// Integer power of a rational.
pub fn pow(r: &Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), rat(3));
        assert_eq!(parse_rational(" -6/4 ").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn json_round_trip() {
        let r = ratio(7, -3);
        let back = rational_from_json(&rational_to_json(&r)).unwrap();
        assert_eq!(back, r);
        assert!(rational_from_json(&serde_json::json!(0.5)).is_err());
    }
}
