//! Exact rational helpers and the `"p/q"` text form used in files and reports.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `"7"`, `"-3"`, or `"7/2"`.
pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    match text.split_once('/') {
        None => text.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// JSON form: integers that fit in `i64` stay numbers, everything else is a string.
pub fn to_json(value: &Rational) -> serde_json::Value {
    if value.denom().is_one() {
        if let Some(v) = value.numer().to_i64() {
            return serde_json::Value::from(v);
        }
    }
    serde_json::Value::from(format(value))
}

pub fn from_json(value: &serde_json::Value) -> Result<Rational> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(v) = n.as_i64() {
                Ok(int(v))
            } else {
                Err(Error::Parse(format!(
                    "number {n} is not an integer; write fractions as \"p/q\" strings"
                )))
            }
        }
        serde_json::Value::String(s) => parse(s),
        other => Err(Error::Parse(format!("expected a rational, found {other}"))),
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Fixed-point view of a set of rationals: every value is an exact integer
/// multiple of `1 / scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Scale {
    scale: BigInt,
}

// Keeps sums over every buyer and item comfortably inside i128.
const SCALED_MAX: i128 = 1 << 80;

impl Scale {
    pub(crate) fn for_values<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Scale {
        let scale = values
            .into_iter()
            .fold(BigInt::one(), |acc, v| num::integer::lcm(acc, v.denom().clone()));
        Scale { scale }
    }

    pub(crate) fn to_scaled(&self, value: &Rational) -> Result<i128> {
        let scaled = value * Rational::from_integer(self.scale.clone());
        debug_assert!(scaled.is_integer());
        scaled
            .to_integer()
            .to_i128()
            .filter(|v| v.abs() <= SCALED_MAX)
            .ok_or_else(|| Error::Overflow(format!("value {} is too large", format(value))))
    }

    pub(crate) fn to_rational(&self, scaled: i128) -> Rational {
        Rational::new(BigInt::from(scaled), self.scale.clone())
    }

    pub(crate) fn big_to_rational(&self, scaled: BigInt) -> Rational {
        Rational::new(scaled, self.scale.clone())
    }
}

pub(crate) fn is_negative(value: &Rational) -> bool {
    value.is_negative()
}
