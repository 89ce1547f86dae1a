//! Coefficient scalars for tensors and polynomials.
//!
//! Two realizations are supported: exact arbitrary-precision rationals
//! (the default for every solver whose output is asserted bit-exact) and
//! `f64` (Monte Carlo estimates and float evaluation). The kind is carried
//! in the type, so mixing kinds is rejected at compile time rather than
//! coerced.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar: arbitrary-precision numerator and denominator,
/// kept in lowest terms with a positive denominator by `num`.
pub type Rational = num::BigRational;

/// Tag identifying the scalar realization, used by serialization and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Rational,
    Float64,
}

impl ScalarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarKind::Rational => "rational",
            ScalarKind::Float64 => "float64",
        }
    }
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalarKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(ScalarKind::Rational),
            "float64" => Ok(ScalarKind::Float64),
            other => Err(format!("unknown scalar kind `{other}`")),
        }
    }
}

/// Operations the tensor algebra needs from a coefficient type.
///
/// Methods take references so the `Rational` instantiation avoids
/// needless big-integer clones; the `f64` instantiation inlines to
/// plain machine arithmetic.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const KIND: ScalarKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn neg(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Division; `rhs` must be nonzero.
    fn div(&self, rhs: &Self) -> Self;
    fn add_assign(&mut self, rhs: &Self);
    fn from_int(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// JSON representation: `"p/q"` string for rationals, number for floats.
    fn to_json(&self) -> serde_json::Value;
    fn from_json(value: &serde_json::Value) -> Option<Self>;
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn neg(&self) -> Self {
        -self
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_json(value: &serde_json::Value) -> Option<Self> {
        let s = value.as_str()?;
        parse_rational(s).ok()
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float64;

    #[inline]
    fn zero() -> Self {
        0.0
    }

    #[inline]
    fn one() -> Self {
        1.0
    }

    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    #[inline]
    fn neg(&self) -> Self {
        -*self
    }

    #[inline]
    fn add(&self, rhs: &Self) -> Self {
        *self + *rhs
    }

    #[inline]
    fn sub(&self, rhs: &Self) -> Self {
        *self - *rhs
    }

    #[inline]
    fn mul(&self, rhs: &Self) -> Self {
        *self * *rhs
    }

    #[inline]
    fn div(&self, rhs: &Self) -> Self {
        *self / *rhs
    }

    #[inline]
    fn add_assign(&mut self, rhs: &Self) {
        *self += *rhs;
    }

    #[inline]
    fn from_int(n: i64) -> Self {
        n as f64
    }

    #[inline]
    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }

    fn from_json(value: &serde_json::Value) -> Option<Self> {
        value.as_f64()
    }
}

/// Parses `"p/q"`, integer, or plain decimal strings (e.g. `"0.3"` becomes
/// `3/10` exactly). Scientific notation is not accepted.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|e| e.to_string())?;
        let d = BigInt::from_str(den.trim()).map_err(|e| e.to_string())?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let int_val = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_digits).map_err(|e| e.to_string())?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("malformed decimal `{s}`"));
        }
        let frac_val = BigInt::from_str(frac_part).map_err(|e| e.to_string())?;
        let scale = num::pow::pow(BigInt::from(10), frac_part.len());
        let mut value =
            Rational::from_integer(int_val.abs()) + Rational::new(frac_val, scale.clone());
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n = BigInt::from_str(s).map_err(|e| e.to_string())?;
    Ok(Rational::from_integer(n))
}

/// Shorthand for a rational `p/q` from machine integers.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}
