use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use dashu_int::ops::{BitTest, Gcd, UnsignedAbs};
use dashu_int::{IBig, Sign, UBig};

use super::NumericsError;

/// Arbitrary-precision rational kept in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: IBig,
    den: UBig,
}

impl Rational {
    pub fn zero() -> Self {
        Rational { num: IBig::ZERO, den: UBig::ONE }
    }

    pub fn one() -> Self {
        Rational { num: IBig::ONE, den: UBig::ONE }
    }

    pub fn from_integer(n: impl Into<IBig>) -> Self {
        Rational { num: n.into(), den: UBig::ONE }
    }

    /// Builds `num/den`, reducing to lowest terms.
    pub fn new(num: impl Into<IBig>, den: impl Into<IBig>) -> Result<Self, NumericsError> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        let (sign, mag) = den.into_parts();
        let num = if sign == Sign::Negative { -num } else { num };
        Ok(Self::reduced(num, mag))
    }

    /// Small-integer convenience constructor; panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("zero denominator")
    }

    pub(crate) fn reduced(num: IBig, den: UBig) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero();
        }
        let g = (&num).unsigned_abs().gcd(&den);
        if g.is_one() {
            Rational { num, den }
        } else {
            let gi = IBig::from(g.clone());
            Rational { num: num / gi, den: den / g }
        }
    }

    pub fn numer(&self) -> &IBig {
        &self.num
    }

    pub fn denom(&self) -> &UBig {
        &self.den
    }

    pub fn into_parts(self) -> (IBig, UBig) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn signum(&self) -> i32 {
        match self.num.sign() {
            _ if self.num.is_zero() => 0,
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        Rational { num: IBig::from((&self.num).unsigned_abs()), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<Self, NumericsError> {
        if self.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        let (sign, mag) = self.num.clone().into_parts();
        let num = IBig::from_parts(sign, self.den.clone());
        Ok(Rational { num, den: mag })
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self, NumericsError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs() as usize;
        Ok(Rational { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn floor(&self) -> IBig {
        let d = IBig::from(self.den.clone());
        let q = &self.num / &d;
        if self.num.sign() == Sign::Negative && !(&q * &d == self.num) {
            q - IBig::ONE
        } else {
            q
        }
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.num, &self.den)
    }

    /// Nearest-ish rational for a finite double (exact binary expansion).
    pub fn from_f64(x: f64) -> Result<Self, NumericsError> {
        if !x.is_finite() {
            return Err(NumericsError::NotFinite);
        }
        if x == 0.0 {
            return Ok(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = IBig::from(mant) * IBig::from(sign);
        Ok(if e >= 0 {
            Self::reduced(m << e as usize, UBig::ONE)
        } else {
            Self::reduced(m, UBig::ONE << (-e) as usize)
        })
    }

    /// Bit lengths of numerator magnitude and denominator.
    pub fn bits(&self) -> (usize, usize) {
        ((&self.num).unsigned_abs().bit_len(), self.den.bit_len())
    }
}

/// Converts `num/den` to a double without materialising huge intermediates.
///
/// Both operands are truncated to their leading 128 bits first, so the cost is
/// linear in the operand size and the relative error stays far below one ulp.
pub fn ratio_to_f64(num: &IBig, den: &UBig) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.sign() == Sign::Negative;
    let mut n = num.unsigned_abs();
    let mut d = den.clone();
    let mut e: i64 = 0;
    let nb = n.bit_len();
    if nb > 128 {
        n >>= nb - 128;
        e += (nb - 128) as i64;
    }
    let db = d.bit_len();
    if db > 128 {
        d >>= db - 128;
        e -= (db - 128) as i64;
    }
    // scale so the integer quotient carries 64+ significant bits
    let shift = 64 + d.bit_len() as i64 - n.bit_len() as i64;
    if shift > 0 {
        n <<= shift as usize;
        e -= shift;
    }
    let q = n / d;
    let mut val = q.to_f64().value();
    while e > 0 && val.is_finite() {
        let step = e.min(1000);
        val *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 && val != 0.0 {
        let step = (-e).min(1000);
        val /= 2f64.powi(step as i32);
        e += step;
    }
    if negative {
        -val
    } else {
        val
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<IBig> for Rational {
    fn from(v: IBig) -> Self {
        Self::from_integer(v)
    }
}

impl FromStr for Rational {
    type Err = NumericsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || NumericsError::Parse(s.to_string());
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let valid = |x: &str, signed: bool| {
            let body = if signed { x.strip_prefix(['+', '-']).unwrap_or(x) } else { x };
            !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
        };
        if !valid(n, true) || !valid(d, true) {
            return Err(bad());
        }
        let n = IBig::from_str(n.strip_prefix('+').unwrap_or(n)).map_err(|_| bad())?;
        let d = IBig::from_str(d.strip_prefix('+').unwrap_or(d)).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        Self::new(n, d)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let l = &self.num * IBig::from(other.den.clone());
        let r = &other.num * IBig::from(self.den.clone());
        l.cmp(&r)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, o: &Rational) -> Rational {
        if self.den == o.den {
            return Rational::reduced(&self.num + &o.num, self.den.clone());
        }
        let num = &self.num * IBig::from(o.den.clone()) + &o.num * IBig::from(self.den.clone());
        Rational::reduced(num, &self.den * &o.den)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, o: &Rational) -> Rational {
        if self.den == o.den {
            return Rational::reduced(&self.num - &o.num, self.den.clone());
        }
        let num = &self.num * IBig::from(o.den.clone()) - &o.num * IBig::from(self.den.clone());
        Rational::reduced(num, &self.den * &o.den)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, o: &Rational) -> Rational {
        if self.is_zero() || o.is_zero() {
            return Rational::zero();
        }
        Rational::reduced(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    /// Panics on division by zero, like primitive integer division.
    fn div(self, o: &Rational) -> Rational {
        let inv = o.recip().expect("rational division by zero");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: &Rational) -> Rational {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num.clone(), den: self.den.clone() }
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, o: &Rational) {
        *self = &*self + o;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, o: &Rational) {
        *self = &*self - o;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, o: &Rational) {
        *self = &*self * o;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |a, b| a * b)
    }
}
