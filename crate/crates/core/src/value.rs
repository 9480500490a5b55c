//! Numeric plumbing: exact rationals, the scaled-integer weights the solvers
//! run on, and the mode-tagged [`Value`] every result is reported in.
//!
//! Exact instances are rescaled at load time so that every score is an
//! integer multiple of `1/scale`; the solvers then work on `i64` and only
//! divide by the scale when a result is reported.

use std::cmp::Ordering;
use std::fmt;
use std::fmt::Debug;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest common denominator accepted for an exact score table.
pub const MAX_SCALE: i64 = 1 << 40;

/// Arithmetic the solvers need from a score type.
pub trait Weight:
    Copy
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;

    fn from_i64(v: i64) -> Self;

    fn to_f64(self) -> f64;

    fn abs(self) -> Self;

    fn times(self, k: i64) -> Self;

    /// `num / (den * scale)` reported in this weight's mode.
    fn ratio(num: Self, den: i64, scale: i64) -> Value;

    fn max_w(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_w(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Weight for i64 {
    const ZERO: Self = 0;

    fn from_i64(v: i64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn abs(self) -> Self {
        i64::abs(self)
    }

    fn times(self, k: i64) -> Self {
        self * k
    }

    fn ratio(num: Self, den: i64, scale: i64) -> Value {
        Value::Exact(Rational64::new(num, den * scale))
    }
}

impl Weight for f64 {
    const ZERO: Self = 0.0;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn times(self, k: i64) -> Self {
        self * k as f64
    }

    fn ratio(num: Self, den: i64, scale: i64) -> Value {
        Value::Float(num / (den as f64 * scale as f64))
    }
}

/// Which arithmetic an instance (and every result derived from it) uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumericMode {
    ExactRational,
    Float64,
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericMode::ExactRational => f.write_str("exact-rational"),
            NumericMode::Float64 => f.write_str("float64"),
        }
    }
}

/// A result value tagged with the arithmetic it was computed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Exact(Rational64),
    Float(f64),
}

impl Value {
    pub fn integer(v: i64) -> Self {
        Value::Exact(Rational64::from_integer(v))
    }

    pub fn mode(&self) -> NumericMode {
        match self {
            Value::Exact(_) => NumericMode::ExactRational,
            Value::Float(_) => NumericMode::Float64,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<Rational64> {
        match self {
            Value::Exact(r) => Some(*r),
            Value::Float(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Float(x) => Value::Float(x.abs()),
        }
    }

    pub fn max(self, other: Value) -> Value {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Value) -> Value {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `self + other`, staying exact when both sides are.
    pub fn plus(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Float(self.to_f64() + other.to_f64()),
        }
    }

    /// `self / k`.
    pub fn div_int(&self, k: i64) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(a / k),
            Value::Float(x) => Value::Float(x / k as f64),
        }
    }

    /// `self - other`, staying exact when both sides are.
    pub fn minus(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Float(self.to_f64() - other.to_f64()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{r}"),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Value", 2)?;
        match self {
            Value::Exact(r) => s.serialize_field("value", &r.to_string())?,
            Value::Float(x) => s.serialize_field("value", x)?,
        }
        s.serialize_field("mode", &self.mode())?;
        s.end()
    }
}

/// Parses an exact rational: an integer, a fraction `a/b`, or a finite
/// decimal with an optional exponent (`-1.25`, `3e-2`).
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let bad = || Error::MalformedNumber(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }

    let mut num: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        num = num
            .checked_mul(10)
            .and_then(|n| n.checked_add((b - b'0') as i128))
            .ok_or_else(bad)?;
    }
    let shift = exponent - frac_part.len() as i32;
    let mut den: i128 = 1;
    if shift >= 0 {
        for _ in 0..shift {
            num = num.checked_mul(10).ok_or_else(bad)?;
        }
    } else {
        for _ in 0..(-shift) {
            den = den.checked_mul(10).ok_or_else(bad)?;
        }
    }
    if negative {
        num = -num;
    }
    let g = num_integer::gcd(num, den);
    let (num, den) = if g > 1 { (num / g, den / g) } else { (num, den) };
    let num = i64::try_from(num).map_err(|_| bad())?;
    let den = i64::try_from(den).map_err(|_| bad())?;
    Ok(Rational64::new(num, den))
}

/// Parses a float64 score (used only by instances declared in float mode).
pub fn parse_float(text: &str) -> Result<f64> {
    let x: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::MalformedNumber(text.to_string()))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::MalformedNumber(text.to_string()))
    }
}

/// Rescales rationals onto a common denominator.
///
/// Returns the integer numerators and the shared scale.
pub fn common_scale(values: &[Rational64]) -> Result<(Vec<i64>, i64)> {
    let mut scale: i64 = 1;
    for v in values {
        scale = num_integer::lcm(scale, *v.denom());
        if scale > MAX_SCALE {
            return Err(Error::MalformedNumber(format!(
                "score denominators exceed common scale limit {MAX_SCALE}"
            )));
        }
    }
    let scaled = values
        .iter()
        .map(|v| {
            (*v.numer() as i128 * (scale / v.denom()) as i128)
                .try_into()
                .map_err(|_| Error::MalformedNumber(v.to_string()))
        })
        .collect::<Result<Vec<i64>>>()?;
    Ok((scaled, scale))
}
