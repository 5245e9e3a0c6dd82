//! Numeric backends.
//!
//! Every model in the crate is generic over [`Scalar`]. Two backends are
//! provided: [`Rational`] (exact, the default for bounds and oracles) and
//! `f64` (used by the annealing solver and by sweeps over large grids).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::FromPrimitive;
/// Re-exported so callers can use `abs`, `zero` and `one` on any [`Scalar`].
pub use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational number with 128-bit numerator and denominator.
pub type Rational = Ratio<i128>;

/// Arithmetic that the bound and oracle code needs from a number type.
pub trait Scalar:
    Copy + Debug + Display + PartialOrd + Signed + Sum + Send + Sync + 'static
{
    /// `true` for backends where `==` is exact.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(self) -> f64;

    /// Converts a float. Rationals take the exact binary value of `v`.
    fn from_f64(v: f64) -> Option<Self>;

    fn from_rational(r: Rational) -> Self;

    /// Equality up to the backend's resolution (exact for rationals).
    fn approx_eq(self, other: Self) -> bool;

    fn to_json(self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Sign with `sgn(0) = +1`.
    fn sign_or_one(self) -> Self {
        if self < Self::zero() {
            -Self::one()
        } else {
            Self::one()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn from_rational(r: Rational) -> Self {
        r.to_f64()
    }

    fn approx_eq(self, other: Self) -> bool {
        let scale = 1.0_f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= 1e-9 * scale
    }

    fn to_json(self) -> Value {
        serde_json::Number::from_f64(self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("number out of range: {n}"))),
            Value::String(s) => parse_rational(s).map(|r| r.to_f64()),
            other => Err(Error::Parse(format!("expected number, got {other}"))),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(v as i128)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(numer as i128, denom as i128)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Rational::from_integer(0));
        }
        let bits = v.to_bits();
        let negative = bits >> 63 == 1;
        let exponent = ((bits >> 52) & 0x7ff) as i32;
        let fraction = (bits & ((1u64 << 52) - 1)) as i128;
        let (mantissa, exponent) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1i128 << 52), exponent - 1075)
        };
        let shift = mantissa.trailing_zeros() as i32;
        let (mantissa, exponent) = (mantissa >> shift, exponent + shift);
        let sign = if negative { -1 } else { 1 };
        let exact = if exponent >= 0 {
            (exponent < 127 - 53).then(|| Rational::from_integer(sign * (mantissa << exponent)))
        } else {
            (-exponent < 127).then(|| Rational::new(sign * mantissa, 1i128 << -exponent))
        };
        // Values too large or too small for 128 bits fall back to the nearest fit.
        exact.or_else(|| <Rational as FromPrimitive>::from_f64(v))
    }

    fn from_rational(r: Rational) -> Self {
        r
    }

    fn approx_eq(self, other: Self) -> bool {
        self == other
    }

    fn to_json(self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            // The textual form of the number keeps decimals like 0.1 exact.
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse(format!("expected number or \"p/q\", got {other}"))),
        }
    }
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.125"` or `"3e-2"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid rational literal {text:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: i128 = format!("{int_part}{frac_part}")
        .trim_start_matches('0')
        .parse()
        .or_else(|e: std::num::ParseIntError| {
            if matches!(e.kind(), std::num::IntErrorKind::Empty) {
                Ok(0)
            } else {
                Err(bad())
            }
        })?;
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Sum of absolute values.
pub fn abs_sum<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().map(|v| v.abs()).sum()
}
