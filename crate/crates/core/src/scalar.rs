//! Arithmetic modes.
//!
//! Every numerical object in the crate is generic over [`Scalar`], which is
//! implemented for exact rationals ([`Rational`]) and for `f64`. Exact mode
//! is only meaningful where the character values that appear are rational,
//! which is what [`Scalar::two_cos`] and [`Scalar::two_sin`] report.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Tolerance used by float mode for sign decisions (spectral nonnegativity,
/// LP feasibility).
pub const FLOAT_TOL: f64 = 1e-9;

/// Tolerance on the duality gap in float mode.
pub const FLOAT_GAP_TOL: f64 = 1e-6;

/// The two arithmetic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: Mode;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn from_rational(q: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Lossless conversion to a rational. For floats this is the exact
    /// binary value.
    fn to_rational(&self) -> Rational;

    /// `2·cos(2πk/e)`, if representable in this mode.
    fn two_cos(k: u64, e: u64) -> Option<Self>;

    /// `2·sin(2πk/e)`, if representable in this mode.
    fn two_sin(k: u64, e: u64) -> Option<Self>;

    /// Sign with the mode's tolerance: values within tolerance of zero
    /// compare equal to zero.
    fn sign(&self) -> Ordering;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn is_negative_tol(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn is_positive_tol(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_zero_tol(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    /// Lossless text form: `p/q` (or `p`) for rationals, shortest round-trip
    /// decimal for floats.
    fn to_text(&self) -> String;

    fn parse_text(s: &str) -> Result<Self>;

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

/// Whether the characters of a group of exponent `e` have rational real
/// parts, i.e. whether exact spectral mode is available.
pub fn exact_exponent(e: u64) -> bool {
    matches!(e, 1 | 2 | 3 | 4 | 6)
}

fn two_cos_exact(k: u64, e: u64) -> Option<i64> {
    if !exact_exponent(e) {
        return None;
    }
    // reduce k/e to lowest terms; the value depends only on k/e mod 1
    let k = k % e;
    let g = num_integer::gcd(k, e);
    let (k, e) = (k / g, e / g);
    Some(match (k, e) {
        (0, 1) => 2,
        (1, 2) => -2,
        (1, 3) | (2, 3) => -1,
        (1, 4) | (3, 4) => 0,
        (1, 6) | (5, 6) => 1,
        _ => unreachable!("reduced fraction {k}/{e} with e | 6 or e | 4"),
    })
}

fn two_sin_exact(k: u64, e: u64) -> Option<i64> {
    let k = k % e;
    let g = num_integer::gcd(k, e);
    let (k, e) = (k / g, e / g);
    match (k, e) {
        (0, 1) | (1, 2) => Some(0),
        (1, 4) => Some(2),
        (3, 4) => Some(-2),
        _ => None,
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn two_cos(k: u64, e: u64) -> Option<Self> {
        two_cos_exact(k, e).map(Self::from_int)
    }

    fn two_sin(k: u64, e: u64) -> Option<Self> {
        two_sin_exact(k, e).map(Self::from_int)
    }

    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        Rational::from_f64(*self).unwrap_or_else(Rational::zero)
    }

    fn two_cos(k: u64, e: u64) -> Option<Self> {
        if let Some(v) = two_cos_exact(k, e) {
            return Some(v as f64);
        }
        let phase = (k % e) as f64 / e as f64;
        Some(2.0 * (2.0 * std::f64::consts::PI * phase).cos())
    }

    fn two_sin(k: u64, e: u64) -> Option<Self> {
        if let Some(v) = two_sin_exact(k, e) {
            return Some(v as f64);
        }
        let phase = (k % e) as f64 / e as f64;
        Some(2.0 * (2.0 * std::f64::consts::PI * phase).sin())
    }

    fn sign(&self) -> Ordering {
        if self.abs() <= FLOAT_TOL {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            return Ok(Scalar::to_f64(&parse_rational(s)?));
        }
        s.parse::<f64>()
            .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.6"` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac}");
        let digits = if digits.is_empty() { "0".to_string() } else { digits };
        let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(Rational::new(numer, denom));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Converts between modes; float to exact uses the exact binary value.
pub fn convert<A: Scalar, B: Scalar>(a: &A) -> B {
    B::from_rational(&a.to_rational())
}

/// Smallest element under the mode's ordering.
pub fn min_scalar<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> Option<S> {
    values.into_iter().fold(None, |acc: Option<S>, v| match acc {
        None => Some(v.clone()),
        Some(a) => Some(if *v < a { v.clone() } else { a }),
    })
}
