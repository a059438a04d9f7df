use std::cmp::Ordering;
use std::fmt;

use dashu_int::ops::{BitTest, Gcd, UnsignedAbs};
use dashu_int::{IBig, UBig};

use super::rational::ratio_to_f64;
use super::{NumericsError, Rational, Scalar};

/// Bit-size summary of a vector written over one common denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CdStats {
    pub denominator_bits: usize,
    pub max_numerator_bits: usize,
    pub entries: usize,
}

/// Common-denominator statistics of an exact vector.
pub fn cd_stats<S: Scalar>(v: &[S]) -> Result<CdStats, NumericsError> {
    let rs: Vec<&Rational> = v.iter().map(|x| x.as_rational().ok_or(NumericsError::Mode)).collect::<Result<_, _>>()?;
    let mut l = UBig::ONE;
    for r in &rs {
        l = lcm(&l, r.denom());
    }
    let max_num = rs
        .iter()
        .map(|r| (r.numer().unsigned_abs() * (&l / r.denom())).bit_len())
        .max()
        .unwrap_or(0);
    Ok(CdStats { denominator_bits: l.bit_len(), max_numerator_bits: max_num, entries: rs.len() })
}

pub fn lcm(a: &UBig, b: &UBig) -> UBig {
    if a == b {
        return a.clone();
    }
    let g = a.gcd(b);
    a / g * b
}

/// Unnormalised fraction `num/den` with `den > 0`.
///
/// Used where gcd reduction of multi-million-bit values would dominate the cost.
#[derive(Clone)]
pub struct BigFraction {
    pub num: IBig,
    pub den: UBig,
}

impl BigFraction {
    pub fn new(num: IBig, den: UBig) -> Result<Self, NumericsError> {
        if den.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        Ok(BigFraction { num, den })
    }

    pub fn from_rational(r: &Rational) -> Self {
        BigFraction { num: r.numer().clone(), den: r.denom().clone() }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::reduced(self.num.clone(), self.den.clone())
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.num, &self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.num.is_zero() {
            0
        } else if self.num > IBig::ZERO {
            1
        } else {
            -1
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        BigFraction { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return BigFraction { num: &self.num + &o.num, den: self.den.clone() };
        }
        BigFraction {
            num: &self.num * IBig::from(o.den.clone()) + &o.num * IBig::from(self.den.clone()),
            den: &self.den * &o.den,
        }
    }

    pub fn neg(&self) -> Self {
        BigFraction { num: -self.num.clone(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// `|self − o| / |o|` as a double; infinite when `o` is zero and `self` is not.
    pub fn relative_error(&self, o: &Self) -> f64 {
        let diff = self.sub(o);
        if diff.is_zero() {
            return 0.0;
        }
        if o.is_zero() {
            return f64::INFINITY;
        }
        // |a/b − c/d| / |c/d| = |ad − cb| / |c b|
        let num = diff.num * IBig::from(o.den.clone());
        let den = (&o.num).unsigned_abs() * &diff.den;
        ratio_to_f64(&num, &den).abs()
    }

    pub fn bits(&self) -> (usize, usize) {
        ((&self.num).unsigned_abs().bit_len(), self.den.bit_len())
    }
}

impl PartialEq for BigFraction {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for BigFraction {}

impl PartialOrd for BigFraction {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for BigFraction {
    fn cmp(&self, o: &Self) -> Ordering {
        if self.den == o.den {
            return self.num.cmp(&o.num);
        }
        (&self.num * IBig::from(o.den.clone())).cmp(&(&o.num * IBig::from(self.den.clone())))
    }
}

impl fmt::Debug for BigFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (nb, db) = self.bits();
        if nb + db < 256 {
            write!(f, "{}/{}", self.num, self.den)
        } else {
            write!(f, "~{:e} ({nb}/{db} bits)", self.to_f64())
        }
    }
}
