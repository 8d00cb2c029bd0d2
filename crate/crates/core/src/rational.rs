//! Exact rational helpers shared by every module.
//!
//! All rationals cross the serialization boundary as `"p/q"` strings with the
//! denominator always present (`"0/1"`, `"3/1"`), so JSON artifacts are
//! lossless.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn qi(value: i64) -> Q {
    Q::from_integer(BigInt::from(value))
}

pub fn qb(value: &BigInt) -> Q {
    Q::from_integer(value.clone())
}

/// Renders `p/q` with the denominator always present.
pub fn fmt_q(value: &Q) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"-0.25"`.
pub fn parse_q(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    if let Some((p, d)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Q::new(p, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let frac: BigInt = frac_part.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let magnitude = Q::new(whole * &scale + frac, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(p))
}

/// Parses a comma-separated list of rationals.
pub fn parse_q_list(text: &str) -> Result<Vec<Q>> {
    text.split(',').map(parse_q).collect()
}

pub fn to_f64(value: &Q) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn pow_q(base: &Q, exp: u64) -> Q {
    let mut result = Q::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// Ceiling of a rational as an integer.
pub fn ceil_int(value: &Q) -> BigInt {
    value.ceil().to_integer()
}

/// Nearest integer, ties to even.
pub fn round_half_even(value: &Q) -> BigInt {
    let floor = value.floor().to_integer();
    let frac = value - qb(&floor);
    let half = q(1, 2);
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

/// Distance to the nearest integer, `min_a |value - a|`.
pub fn nearest_int_dist(value: &Q) -> Q {
    let frac = value - value.floor();
    let other = Q::one() - &frac;
    if frac <= other {
        frac
    } else {
        other
    }
}

/// Smallest integer `s >= 0` with `s^2 >= value` (value >= 0).
pub fn ceil_sqrt(value: &Q) -> BigInt {
    if !value.is_positive() {
        return BigInt::zero();
    }
    // s^2 >= p/d  <=>  s^2 * d >= p
    let p = value.numer();
    let d = value.denom();
    let mut s = (p / d).sqrt();
    while &s * &s * d < *p {
        s += 1;
    }
    while s.is_positive() && (&s - 1u32) * (&s - 1u32) * d >= *p {
        s -= 1;
    }
    s
}

/// Rational upper bound on `sqrt(n)` with absolute error below `2^-bits`.
pub fn sqrt_upper(n: &BigInt, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = n * &scale * &scale;
    let mut root = scaled.sqrt();
    if &root * &root < scaled {
        root += 1;
    }
    Q::new(root, scale)
}

/// Compares `sqrt(a)` with `sqrt(b)` style quantities: returns true iff
/// `x > y * sqrt(s)` for rational `x`, `y >= 0` and integer `s >= 0`.
pub fn gt_times_sqrt(x: &Q, y: &Q, s: &BigInt) -> bool {
    if !x.is_positive() {
        return false;
    }
    x * x > y * y * qb(s)
}

pub fn dot_int(u: &[BigInt], p: &[Q]) -> Q {
    u.iter()
        .zip(p)
        .fold(Q::zero(), |acc, (ui, pi)| acc + qb(ui) * pi)
}

pub fn norm_sq_int(u: &[BigInt]) -> BigInt {
    u.iter().map(|x| x * x).sum()
}

pub fn norm_sq(v: &[Q]) -> Q {
    v.iter().fold(Q::zero(), |acc, x| acc + x * x)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn abs(value: &Q) -> Q {
    value.abs()
}

/// Serde adapter: a single rational as `"p/q"`.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_q(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: a list of rationals as `["p/q", ...]`.
pub mod serde_qvec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&fmt_q(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_q(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter: an optional rational.
pub mod serde_opt_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        value: &Option<Q>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&fmt_q(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Q>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_q(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

fn int_to_json(value: &BigInt) -> serde_json::Value {
    match value.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(value.to_string()),
    }
}

fn int_from_json(value: &serde_json::Value) -> std::result::Result<BigInt, String> {
    match value {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("not an integer: {n}")),
        serde_json::Value::String(s) => s.parse().map_err(|_| format!("not an integer: {s:?}")),
        other => Err(format!("not an integer: {other}")),
    }
}

/// Serde adapter: a big integer as a JSON number (or a decimal string when it
/// does not fit in `i64`).
pub mod serde_int {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(value: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        int_to_json(value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        int_from_json(&value).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: a list of big integers, same encoding as [`serde_int`].
pub mod serde_intvec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        values: &[BigInt],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        values
            .iter()
            .map(int_to_json)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<BigInt>, D::Error> {
        let values = Vec::<serde_json::Value>::deserialize(d)?;
        values
            .iter()
            .map(|v| int_from_json(v).map_err(serde::de::Error::custom))
            .collect()
    }
}
