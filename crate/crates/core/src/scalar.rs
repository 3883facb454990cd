//! Scalar abstraction shared by every geometric and integration routine.
//!
//! The library is written against [`Scalar`], an ordered field. Exact
//! rationals ([`Rational`]) are the reference instantiation; `f64` is
//! supported for quick numerical previews and cross-checks, with sign tests
//! made against a small absolute tolerance.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, NumAssignRef, NumRef, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Absolute tolerance used by the floating-point instantiation.
pub const FLOAT_EPS: f64 = 1e-9;

/// An ordered field usable as the coordinate type of polytopes, PL functions
/// and integrals.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Signed
    + NumAssign
    + NumRef
    + NumAssignRef
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact and sign tests need no tolerance.
    const EXACT: bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_rational(q: &Rational) -> Self;

    /// Sign with the instantiation's tolerance applied.
    fn sign(&self) -> Ordering;

    fn to_f64(&self) -> f64;

    fn floor_i64(&self) -> Option<i64>;

    fn ceil_i64(&self) -> Option<i64>;

    fn is_zero_tol(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Tolerance-aware comparison.
    fn cmp_tol(&self, other: &Self) -> Ordering {
        (self.clone() - other).sign()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
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

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn floor_i64(&self) -> Option<i64> {
        self.numer().div_floor(self.denom()).to_i64()
    }

    fn ceil_i64(&self) -> Option<i64> {
        Integer::div_ceil(self.numer(), self.denom()).to_i64()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn sign(&self) -> Ordering {
        if self.abs() <= FLOAT_EPS {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn floor_i64(&self) -> Option<i64> {
        // snap values sitting within tolerance of an integer
        let r = self.round();
        let v = if (self - r).abs() <= FLOAT_EPS { r } else { self.floor() };
        v.is_finite().then_some(v as i64)
    }

    fn ceil_i64(&self) -> Option<i64> {
        let r = self.round();
        let v = if (self - r).abs() <= FLOAT_EPS { r } else { self.ceil() };
        v.is_finite().then_some(v as i64)
    }
}

/// Shorthand for building exact rationals in code and tests.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::from_ratio(numer, denom)
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q`, `p`, or a finite decimal like `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let whole: BigInt = if int_digits.is_empty() { BigInt::zero() } else { int_digits.parse().ok()? };
        let frac: BigInt = frac_part.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let mag = Rational::new(whole * &scale + frac, scale);
        return Some(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Dot product of two equal-length slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |mut acc, (x, y)| {
        acc += x.clone() * y;
        acc
    })
}

/// Exact factorial as a scalar.
pub fn factorial<T: Scalar>(n: u32) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_int(k as i64))
}
