use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::approx::DEFAULT_PRECISION;
use super::{Approx, Rational};

/// Which number field a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

/// Field element used by the generic matrix and dynamics code.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Square root in approximate fields; `None` in the exact field.
    fn sqrt(&self) -> Option<Self>;

    fn as_rational(&self) -> Option<&Rational> {
        None
    }

    /// `|self − other| ≤ tol`, with `tol` explicit. Exact values compare exactly when `tol == 0`.
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).abs().to_f64() <= tol
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn abs(&self) -> Self {
        Rational::abs(self)
    }
    fn sqrt(&self) -> Option<Self> {
        None
    }
    fn as_rational(&self) -> Option<&Rational> {
        Some(self)
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        if tol == 0.0 {
            self == other
        } else {
            (self - other).abs().to_f64() <= tol
        }
    }
}

impl Scalar for Approx {
    const MODE: Mode = Mode::Approx;

    fn zero() -> Self {
        Approx::zero()
    }
    fn one() -> Self {
        Approx::one()
    }
    fn from_i64(v: i64) -> Self {
        Approx::from_i64(v)
    }
    fn from_rational(r: &Rational) -> Self {
        Approx::from_rational_prec(r, DEFAULT_PRECISION)
    }
    fn to_f64(&self) -> f64 {
        Approx::to_f64(self)
    }
    fn is_zero(&self) -> bool {
        Approx::is_zero(self)
    }
    fn abs(&self) -> Self {
        Approx::abs(self)
    }
    fn sqrt(&self) -> Option<Self> {
        Some(Approx::sqrt(self))
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Approx;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Option<Self> {
        Some(f64::sqrt(*self))
    }
}
