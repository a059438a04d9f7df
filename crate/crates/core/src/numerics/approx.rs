use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;

use super::Rational;

/// Default mantissa width for [`Approx`] values.
pub const DEFAULT_PRECISION: usize = 64;

type Float = FBig<HalfEven, 2>;

/// Binary floating value with a configurable mantissa width and unbounded exponent.
///
/// Rounds to nearest, ties to even. Binary operations run at the larger of the
/// two operand precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Approx(Float);

impl Approx {
    pub fn from_rational_prec(r: &Rational, precision: usize) -> Self {
        let p = precision.max(53);
        let n = Float::from(r.numer().clone()).with_precision(p).value();
        let d = Float::from(IBig::from(r.denom().clone())).with_precision(p).value();
        Approx(n / d)
    }

    pub fn from_f64_prec(x: f64, precision: usize) -> Self {
        let r = Rational::from_f64(x).expect("finite input");
        Self::from_rational_prec(&r, precision)
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn with_precision(&self, precision: usize) -> Self {
        Approx(self.0.clone().with_precision(precision.max(53)).value())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn sqrt(&self) -> Self {
        if self.0 == Float::ZERO {
            return self.clone();
        }
        Approx(self.0.sqrt())
    }

    pub fn abs(&self) -> Self {
        if self.0 < Float::ZERO {
            Approx(-self.0.clone())
        } else {
            self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Float::ZERO
    }

    pub(crate) fn zero() -> Self {
        Self::from_i64(0)
    }

    pub(crate) fn one() -> Self {
        Self::from_i64(1)
    }

    pub(crate) fn from_i64(v: i64) -> Self {
        Approx(Float::from(IBig::from(v)).with_precision(DEFAULT_PRECISION).value())
    }
}

impl fmt::Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl fmt::Debug for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Approx({:e}, p={})", self.to_f64(), self.precision())
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, o: Approx) -> Approx {
        Approx(self.0 + o.0)
    }
}

impl Sub for Approx {
    type Output = Approx;
    fn sub(self, o: Approx) -> Approx {
        Approx(self.0 - o.0)
    }
}

impl Mul for Approx {
    type Output = Approx;
    fn mul(self, o: Approx) -> Approx {
        Approx(self.0 * o.0)
    }
}

impl Div for Approx {
    type Output = Approx;
    fn div(self, o: Approx) -> Approx {
        Approx(self.0 / o.0)
    }
}

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx(-self.0)
    }
}

impl Approx {
    pub fn total_cmp(&self, o: &Approx) -> Ordering {
        self.partial_cmp(o).unwrap_or(Ordering::Equal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_at_least_requested() {
        let a = Approx::from_rational_prec(&Rational::frac(1, 3), 64);
        assert_eq!(a.precision(), 64);
        let b = Approx::from_rational_prec(&Rational::frac(1, 3), 200);
        assert_eq!((a.clone() + b.clone()).precision(), 200);
        assert!((a.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn tiny_values_do_not_underflow() {
        let third = Approx::from_rational_prec(&Rational::frac(1, 3), 64);
        let mut x = Approx::one();
        for _ in 0..2000 {
            x = x * third.clone();
        }
        assert!(!x.is_zero());
        assert!(x > Approx::zero());
    }

    #[test]
    fn sqrt_and_division() {
        let two = Approx::from_i64(2);
        let r = (two.clone() / Approx::from_i64(1)).sqrt();
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        let q = Approx::from_i64(1) / Approx::from_i64(3);
        assert!((q.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }
}
