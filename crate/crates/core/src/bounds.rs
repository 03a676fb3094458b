//! Closed-form width lower bounds and extremal edge-count thresholds.
//!
//! Quantities of the form `c * d^(p/q)` are irrational for most `d`, so
//! results carry an exact rational when one exists and always carry a
//! decimal rounded toward zero with a stated precision. The directed
//! rounding is certified by exact integer arithmetic: the floor of
//! `c * 10^s * d^(p/q)` equals the integer q-th root of `(c 10^s)^q d^p`,
//! which is computed exactly, never estimated.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{floor_decimal, rat, rint, Rational};
use crate::{Error, Result};

/// Fractional digits carried by certified decimals.
pub const DECIMAL_PRECISION: u32 = 6;

/// Largest supported depth parameter for the power-form bounds. The
/// hypothesis `k <= log2(log2(d))` already fails for every representable
/// `d` well below this cap; the cap only bounds the exponent arithmetic.
pub const MAX_DEPTH_PARAMETER: u32 = 16;

/// A bound value: exact rational when available, and a decimal that is
/// always a certified lower bound on the true value (`decimal <= value <
/// decimal + 10^-precision`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    #[serde(with = "crate::rational::serde_string_opt")]
    pub value_exact: Option<Rational>,
    pub value_decimal: String,
    pub precision: u32,
    pub valid: bool,
    pub validity_note: String,
}

/// `alpha_k = 1 / (2^(k-2) - 1)` for `k >= 3`.
pub fn alpha(k: u32) -> Result<Rational> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("alpha requires k >= 3, got {k}")));
    }
    let denom = (BigInt::one() << (k - 2)) - BigInt::one();
    Ok(Rational::new(BigInt::one(), denom))
}

/// Checks the telescoping identity `(1 - alpha_k)(1 + alpha_{k-1}) = 1 + alpha_k`
/// in exact rational arithmetic. Must hold for every `k >= 4`.
pub fn alpha_identity_check(k: u32) -> Result<bool> {
    if k < 4 {
        return Err(Error::InvalidInput(format!(
            "identity requires k >= 4, got {k}"
        )));
    }
    let ak = alpha(k)?;
    let ak1 = alpha(k - 1)?;
    let one = Rational::one();
    Ok((&one - &ak) * (&one + &ak1) == one + ak)
}

/// Whether `3 <= k <= log2(log2(d))`, decided by the exact integer
/// comparison `2^(2^k) <= d`.
pub fn depth_hypothesis_holds(d: u64, k: u32) -> bool {
    if !(3..=6).contains(&k) {
        // 2^(2^7) = 2^128 already exceeds every u64 input.
        return false;
    }
    let threshold = BigUint::one() << (1u64 << k);
    BigUint::from(d) >= threshold
}

/// Exponent `1 + alpha_k` as a reduced fraction `(p, q)`.
fn exponent_one_plus_alpha(k: u32) -> (u64, u64) {
    let half_pow = 1u64 << (k - 2);
    (half_pow, half_pow - 1)
}

/// Floor of `(num/10) * d^(p/q) * 10^digits` as an exact integer, via the
/// identity `floor(x^(1/q)) = nth_root(x)`.
fn floor_scaled_power(num: u64, d: u64, p: u64, q: u64, digits: u32) -> BigUint {
    debug_assert!(q >= 1 && digits >= 1);
    // (num/10) * 10^digits = num * 10^(digits-1)
    let scale = BigUint::from(num) * BigUint::from(10u32).pow(digits - 1);
    let arg = scale.pow(q as u32) * BigUint::from(d).pow(p as u32);
    arg.nth_root(q as u32)
}

fn decimal_from_scaled(scaled: &BigUint, digits: u32) -> String {
    let mut body = scaled.to_string();
    if body.len() <= digits as usize {
        body = format!("{}{}", "0".repeat(digits as usize + 1 - body.len()), body);
    }
    let split = body.len() - digits as usize;
    format!("{}.{}", &body[..split], &body[split..])
}

/// Minimum width required at depth `k`: `(1/10) d^(1 + alpha_k)`.
///
/// `valid` reflects the hypothesis `3 <= k <= log2(log2(d))`; the value is
/// computed either way. The exact rational is present iff `d^(1+alpha_k)`
/// is rational, i.e. iff `d^p` is a perfect q-th power.
pub fn width_lower_bound(d: u64, k: u32) -> Result<BoundResult> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("requires d >= 2, got {d}")));
    }
    if k < 3 {
        return Err(Error::InvalidInput(format!("requires k >= 3, got {k}")));
    }
    if k > MAX_DEPTH_PARAMETER {
        return Err(Error::InvalidInput(format!(
            "depth parameter {k} exceeds the supported cap {MAX_DEPTH_PARAMETER}; \
             the hypothesis k <= log2(log2(d)) is unsatisfiable there for any \
             representable d"
        )));
    }
    let (p, q) = exponent_one_plus_alpha(k);
    let power = BigUint::from(d).pow(p as u32);
    let root = power.nth_root(q as u32);
    let value_exact = if root.clone().pow(q as u32) == power {
        Some(Rational::new(BigInt::from(root), BigInt::from(10)))
    } else {
        None
    };
    let value_decimal = match &value_exact {
        Some(v) => floor_decimal(v, DECIMAL_PRECISION),
        None => decimal_from_scaled(
            &floor_scaled_power(1, d, p, q, DECIMAL_PRECISION),
            DECIMAL_PRECISION,
        ),
    };
    let valid = depth_hypothesis_holds(d, k);
    Ok(BoundResult {
        value_exact,
        value_decimal,
        precision: DECIMAL_PRECISION,
        valid,
        validity_note: if valid {
            "3 <= k <= log2(log2(d))".to_string()
        } else {
            "k > log2(log2(d))".to_string()
        },
    })
}

/// Minimum width at depth 3: `floor((1/8 - 1/(4d) - 1/(2d^2)) d^2)`,
/// clamped at zero where the expression is vacuous.
pub fn depth3_width_lower_bound(d: u64) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::InvalidInput("requires d >= 1".into()));
    }
    let d = rint(d as i64);
    let value = &d * &d / rint(8) - &d / rint(4) - rat(1, 2);
    let floored = value.floor().to_integer();
    Ok(if floored.is_negative() {
        BigUint::zero()
    } else {
        floored.to_biguint().expect("nonnegative")
    })
}

/// Largest edge count of a graph on `d` vertices with no clique of size
/// `r >= 3`: `(1 - 1/(r-1)) d^2 / 2`. Any graph with strictly more edges
/// contains such a clique.
pub fn turan_max_edges(d: u64, r: u32) -> Result<Rational> {
    if r < 3 {
        return Err(Error::InvalidInput(format!("requires r >= 3, got {r}")));
    }
    let d = rint(d as i64);
    let fraction = Rational::one() - Rational::new(1.into(), BigInt::from(r - 1));
    Ok(fraction * &d * &d / rint(2))
}

/// Edge threshold `(1 - (1-delta)/(r-1)) d^2 / 2` guaranteeing a clique of
/// size `r` whenever `d >= sqrt(2/delta)`.
pub fn clique_forcing_edges(d: u64, r: u32, delta: &Rational) -> Result<BoundResult> {
    if r < 3 {
        return Err(Error::InvalidInput(format!("requires r >= 3, got {r}")));
    }
    if !delta.is_positive() {
        return Err(Error::InvalidInput("requires delta > 0".into()));
    }
    let d_rat = rint(d as i64);
    // d >= sqrt(2/delta)  <=>  d^2 delta >= 2
    if &d_rat * &d_rat * delta < rint(2) {
        return Err(Error::InvalidInput(format!(
            "hypothesis violated: d = {d} is below sqrt(2/delta)"
        )));
    }
    let fraction = Rational::one() - (Rational::one() - delta) / rint((r - 1) as i64);
    let value = fraction * &d_rat * &d_rat / rint(2);
    Ok(BoundResult {
        value_decimal: floor_decimal(&value, DECIMAL_PRECISION),
        value_exact: Some(value),
        precision: DECIMAL_PRECISION,
        valid: true,
        validity_note: "d >= sqrt(2/delta)".to_string(),
    })
}

/// Clique size guaranteed by the width premise at depth `k`:
/// `floor(2.1 d^(1 - alpha_k) + 1)`, with the floor computed exactly.
pub fn guaranteed_clique_size(d: u64, k: u32) -> Result<u64> {
    if !depth_hypothesis_holds(d, k) {
        return Err(Error::InvalidInput(format!(
            "hypothesis 3 <= k <= log2(log2(d)) fails for d = {d}, k = {k}"
        )));
    }
    // 1 - alpha_k = (2^(k-2) - 2) / (2^(k-2) - 1)
    let half_pow = 1u64 << (k - 2);
    let (p, q) = (half_pow - 2, half_pow - 1);
    // floor(2.1 t + 1) = floor(floor(21 t) / 10) + 1 with t = d^(p/q)
    let scaled = if q == 1 {
        BigUint::from(21u32) * BigUint::from(d).pow(p as u32)
    } else {
        let arg = BigUint::from(21u32).pow(q as u32) * BigUint::from(d).pow(p as u32);
        arg.nth_root(q as u32)
    };
    let r = scaled / BigUint::from(10u32) + BigUint::one();
    r.to_u64().ok_or_else(|| {
        Error::InvalidInput("guaranteed clique size exceeds u64 range".into())
    })
}
