//! Exact rational scalars and their textual forms.
//!
//! Every weight, bias, input coordinate, and derived quantity in this crate
//! is a [`Rational`]. `num_rational::BigRational` keeps values in canonical
//! reduced form (gcd of numerator and denominator is 1, denominator
//! positive), which makes equality, ordering, and hashing structural.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational number, always in canonical reduced form.
pub type Rational = num_rational::BigRational;

/// `num / den` as a [`Rational`]. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// The integer `n` as a [`Rational`].
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// max(0, x), the rectifier.
pub fn relu(x: &Rational) -> Rational {
    if x.is_negative() {
        Rational::zero()
    } else {
        x.clone()
    }
}

/// Parses `"p/q"`, an integer literal, or a finite decimal such as `"0.5"`.
///
/// All three forms are exact; decimals are converted to their exact rational
/// value. Anything else (including scientific notation) is rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::BadRationalLiteral {
        literal: text.to_string(),
    };
    let t = text.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let (negative, digits) = match int_part.as_bytes().first() {
            Some(b'-') => (true, &int_part[1..]),
            Some(b'+') => (false, &int_part[1..]),
            _ => (false, int_part),
        };
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut joined = String::with_capacity(digits.len() + frac_part.len());
        joined.push_str(if digits.is_empty() { "0" } else { digits });
        joined.push_str(frac_part);
        let numer: BigInt = joined.parse().map_err(|_| bad())?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = Rational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical textual form: `"p"` when the denominator is 1, else `"p/q"`.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Decimal expansion of `value` with `digits` fractional digits, rounded
/// toward minus infinity, so the printed number never exceeds the true one.
pub fn floor_decimal(value: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (value * Rational::from_integer(scale)).floor();
    let scaled = scaled.to_integer();
    if digits == 0 {
        return scaled.to_string();
    }
    let negative = scaled.is_negative();
    let mut body = scaled.abs().to_string();
    if body.len() <= digits as usize {
        body = format!("{}{}", "0".repeat(digits as usize + 1 - body.len()), body);
    }
    let split = body.len() - digits as usize;
    format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        &body[..split],
        &body[split..]
    )
}

/// Serde adapters storing rationals as canonical strings.
pub mod serde_string {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(de)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_string_vec {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        values: &[Rational],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(values.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(de)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Rational>`.
pub mod serde_string_opt {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        value: &Option<Rational>,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(v) => ser.serialize_some(&format_rational(v)),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(de)?;
        text.map(|t| parse_rational(&t).map_err(de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for `Vec<(usize, Rational)>` pairs.
pub mod serde_string_pairs {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        values: &[(usize, Rational)],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(values.iter().map(|(i, v)| (*i, format_rational(v))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<(usize, Rational)>, D::Error> {
        let pairs = Vec::<(usize, String)>::deserialize(de)?;
        pairs
            .into_iter()
            .map(|(i, t)| Ok((i, parse_rational(&t).map_err(de::Error::custom)?)))
            .collect()
    }
}
