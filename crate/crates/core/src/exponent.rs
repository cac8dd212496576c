//! Scalars with exactness tracking, and extended positive exponents in `(0, ∞]`.
//!
//! The classification theorems are discontinuous exactly on the critical lines
//! `s₀ − s₁ = max(0, n/p₀ − n/p₁)`, so parameters that arrive as rationals are
//! kept as rationals and compared exactly. Anything that arrives as a float (or
//! overflows the rational representation) degrades to an approximate value and
//! is compared with the absolute tolerance [`APPROX_TOL`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParamError;

/// Absolute tolerance used when at least one operand of a comparison is inexact.
pub const APPROX_TOL: f64 = 1e-12;

/// A real number that is either an exact rational or a double.
#[derive(Clone, Copy, Debug)]
pub enum Real {
    Exact(Rational64),
    Approx(f64),
}

impl Real {
    pub fn int(v: i64) -> Self {
        Real::Exact(Rational64::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Real::Exact(Rational64::new(num, den))
    }

    pub fn zero() -> Self {
        Real::int(0)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Real::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Real::Approx(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Real::Exact(_))
    }

    /// Converts a double, keeping it exact when it is a dyadic rational with a
    /// modest denominator (covers every literal like `0.5`, `0.25`, `3.0`).
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            for k in 0..=30u32 {
                let scaled = x * f64::from(1u32 << k);
                if scaled.fract() == 0.0 && scaled.abs() < 9.0e15 {
                    return Real::Exact(Rational64::new(scaled as i64, 1i64 << k));
                }
            }
        }
        Real::Approx(x)
    }

    fn combine(
        self,
        other: Real,
        exact: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Real {
        if let (Real::Exact(a), Real::Exact(b)) = (self, other) {
            if let Some(r) = exact(&a, &b) {
                return Real::Exact(r);
            }
        }
        Real::Approx(approx(self.to_f64(), other.to_f64()))
    }

    pub fn add(self, other: Real) -> Real {
        self.combine(other, |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn sub(self, other: Real) -> Real {
        self.combine(other, |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn mul(self, other: Real) -> Real {
        self.combine(other, |a, b| a.checked_mul(b), |a, b| a * b)
    }

    /// Division; the caller guarantees `other` is nonzero.
    pub fn div(self, other: Real) -> Real {
        self.combine(
            other,
            |a, b| if b.is_zero() { None } else { a.checked_div(b) },
            |a, b| a / b,
        )
    }

    pub fn recip(self) -> Real {
        Real::int(1).div(self)
    }

    /// Three-way comparison: exact when both sides are exact, otherwise equal
    /// whenever the difference is within [`APPROX_TOL`].
    pub fn compare(self, other: Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(&b),
            _ => {
                let d = self.to_f64() - other.to_f64();
                if d.abs() <= APPROX_TOL {
                    Ordering::Equal
                } else if d < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn max(self, other: Real) -> Real {
        if self.compare(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn sign(self) -> Ordering {
        self.compare(Real::zero())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.compare(*other) == Ordering::Equal
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Self {
        Real::int(v)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Real::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Real::Approx(x) => write!(f, "{x}"),
        }
    }
}

fn parse_decimal(s: &str) -> Option<Rational64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > 17 {
        return None;
    }
    let den = 10i64.checked_pow(frac_part.len() as u32)?;
    let int_val: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    let frac_val: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let num = int_val.checked_mul(den)?.checked_add(frac_val)?;
    Some(Rational64::new(if neg { -num } else { num }, den))
}

impl FromStr for Real {
    type Err = ParamError;

    /// Accepts `a/b`, plain decimals (kept exact) and anything else `f64`
    /// parses (kept approximate).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParamError::Unparsable(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Real::ratio(n, d));
        }
        if let Some(r) = parse_decimal(s) {
            return Ok(Real::Exact(r));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        Ok(Real::from_f64(x))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Real::Exact(r) if *r.denom() == 1 => ser.serialize_i64(*r.numer()),
            Real::Exact(_) => ser.serialize_str(&self.to_string()),
            Real::Approx(x) => ser.serialize_f64(*x),
        }
    }
}

struct RealVisitor;

impl Visitor<'_> for RealVisitor {
    type Value = Real;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or a rational string such as \"1/2\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
        Ok(Real::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
        i64::try_from(v).map(Real::int).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
        Ok(Real::from_f64(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        de.deserialize_any(RealVisitor)
    }
}

/// An integrability or summability exponent in `(0, ∞]`, with `1/∞ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(Real),
    Infinite,
}

impl Exponent {
    pub fn int(v: i64) -> Self {
        Exponent::Finite(Real::int(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Finite(Real::ratio(num, den))
    }

    /// Validated constructor from a plain double; `f64::INFINITY` maps to ∞.
    pub fn from_f64(x: f64) -> Result<Self, ParamError> {
        if x == f64::INFINITY {
            return Ok(Exponent::Infinite);
        }
        if !(x > 0.0) || !x.is_finite() {
            return Err(ParamError::NonPositiveExponent(x.to_string()));
        }
        Ok(Exponent::Finite(Real::from_f64(x)))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// `1/p`, with `1/∞ = 0` exactly.
    pub fn recip(self) -> Real {
        match self {
            Exponent::Infinite => Real::zero(),
            Exponent::Finite(r) => r.recip(),
        }
    }

    /// The exponent as a double (`f64::INFINITY` for ∞).
    pub fn value(self) -> f64 {
        match self {
            Exponent::Infinite => f64::INFINITY,
            Exponent::Finite(r) => r.to_f64(),
        }
    }

    pub fn recip_f64(self) -> f64 {
        match self {
            Exponent::Infinite => 0.0,
            Exponent::Finite(r) => 1.0 / r.to_f64(),
        }
    }

    /// Ordering on `(0, ∞]` (exact when both are exact).
    pub fn compare(self, other: Exponent) -> Ordering {
        match (self, other) {
            (Exponent::Infinite, Exponent::Infinite) => Ordering::Equal,
            (Exponent::Infinite, _) => Ordering::Greater,
            (_, Exponent::Infinite) => Ordering::Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.compare(b),
        }
    }

    pub fn validate(self) -> Result<Self, ParamError> {
        match self {
            Exponent::Finite(r) if r.sign() != Ordering::Greater || !r.to_f64().is_finite() => {
                Err(ParamError::NonPositiveExponent(r.to_string()))
            }
            _ => Ok(self),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinite => f.write_str("inf"),
            Exponent::Finite(r) => r.fmt(f),
        }
    }
}

impl FromStr for Exponent {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if ["inf", "infinity", "∞", "+inf"].iter().any(|k| t.eq_ignore_ascii_case(k)) {
            return Ok(Exponent::Infinite);
        }
        Exponent::Finite(t.parse()?).validate()
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Infinite => ser.serialize_str("inf"),
            Exponent::Finite(r) => r.serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct ExpVisitor;
        impl Visitor<'_> for ExpVisitor {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number, a rational string or \"inf\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exponent, E> {
                Exponent::int(v).validate().map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exponent, E> {
                let v = i64::try_from(v).map_err(E::custom)?;
                self.visit_i64(v)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exponent, E> {
                Exponent::from_f64(v).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }
        de.deserialize_any(ExpVisitor)
    }
}
