//! Exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("`{0}` is not of the form p/q")]
    Syntax(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
    #[error("`{0}` is not in lowest terms")]
    NotReduced(String),
}

/// Shorthand constructor used all over the crate and its tests.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn pow2(k: i64) -> Rational {
    let two = int(2);
    if k >= 0 {
        num_traits::pow(two, k as usize)
    } else {
        num_traits::pow(two, (-k) as usize).recip()
    }
}

/// Formats as `p/q`, including integers (`3/1`, `0/1`).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`. A fraction must already be in lowest
/// terms with a positive denominator.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| ParseRationalError::Syntax(s.to_string()))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| ParseRationalError::Syntax(s.to_string()))?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    if den.is_negative() || !num.gcd(&den).is_one() && !num.is_zero() {
        return Err(ParseRationalError::NotReduced(s.to_string()));
    }
    if num.is_zero() && !den.is_one() {
        return Err(ParseRationalError::NotReduced(s.to_string()));
    }
    Ok(Rational::new_raw(num, den))
}

/// Is `x` of the form `m / 2^k`?
pub fn is_dyadic(x: &Rational) -> bool {
    let d = x.denom();
    (d & (d - BigInt::one())).is_zero()
}

pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(serde::de::Error::custom)
}

/// `serde(with = ...)` adapter for `(Rational, Rational)` pairs.
pub mod pair {
    use super::*;
    use serde::ser::SerializeTuple;

    pub fn serialize<S: Serializer>(p: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&format_rational(&p.0))?;
        t.serialize_element(&format_rational(&p.1))?;
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rational, Rational), D::Error> {
        let (a, b) = <(String, String)>::deserialize(d)?;
        let a = parse_rational(&a).map_err(serde::de::Error::custom)?;
        let b = parse_rational(&b).map_err(serde::de::Error::custom)?;
        Ok((a, b))
    }
}
