use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use dashu_int::ops::BitTest;
use dashu_int::{IBig, UBig};

use super::ResidueError;

/// Largest exponent size, in bits, that ⊕ may create.
pub const DEFAULT_EXPONENT_BITS: usize = 1 << 16;

/// Integer polynomial stored as exponent → nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    terms: BTreeMap<UBig, IBig>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly::default()
    }

    pub fn monomial(coeff: impl Into<IBig>, exp: impl Into<UBig>) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(exp.into(), coeff.into());
        p
    }

    /// `c·x`.
    pub fn linear(c: i64) -> Self {
        Self::monomial(c, 1u8)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UBig, &IBig)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &UBig) -> IBig {
        self.terms.get(exp).cloned().unwrap_or(IBig::ZERO)
    }

    fn add_term(&mut self, exp: UBig, c: IBig) {
        if c == IBig::ZERO {
            return;
        }
        let sum = self.terms.remove(&exp).unwrap_or(IBig::ZERO) + c;
        if sum != IBig::ZERO {
            self.terms.insert(exp, sum);
        }
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low_degree(&self) -> Result<&UBig, ResidueError> {
        self.terms.keys().next().ok_or(ResidueError::ZeroPolynomial)
    }

    pub fn degree(&self) -> Result<&UBig, ResidueError> {
        self.terms.keys().next_back().ok_or(ResidueError::ZeroPolynomial)
    }

    pub fn leading_coeff(&self) -> Option<&IBig> {
        self.terms.values().next_back()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        SparsePoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// `x^k · self`.
    pub fn shift(&self, k: &UBig) -> Self {
        SparsePoly { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &IBig) -> Self {
        let mut r = SparsePoly::zero();
        for (e, a) in &self.terms {
            r.add_term(e.clone(), a * c);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = SparsePoly::zero();
        for (e, a) in &self.terms {
            for (f, b) in &o.terms {
                r.add_term(e + f, a * b);
            }
        }
        r
    }
}

/// `p ⊕ q = p + q + (p − q)·x^{2^{h(p − q)}}`, with the last term zero when `p = q`.
pub fn oplus(p: &SparsePoly, q: &SparsePoly, budget_bits: usize) -> Result<SparsePoly, ResidueError> {
    let diff = p.sub(q);
    let sum = p.add(q);
    if diff.is_zero() {
        return Ok(sum);
    }
    let h = diff.low_degree()?;
    let shift_bits = usize::try_from(h).ok().filter(|&b| b < budget_bits);
    let Some(h) = shift_bits else {
        let height = if h.bit_len() <= 64 { h.to_string() } else { format!("(a {}-bit integer)", h.bit_len()) };
        return Err(ResidueError::Overflow { height, budget: budget_bits });
    };
    Ok(sum.add(&diff.shift(&(UBig::ONE << h))))
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = *c < IBig::ZERO;
            let mag = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *e == UBig::ZERO {
                write!(f, "{mag}")?;
                continue;
            }
            if mag != IBig::ONE {
                write!(f, "{mag}*")?;
            }
            if *e == UBig::ONE {
                write!(f, "x")?;
            } else {
                write!(f, "x^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SparsePoly {
    type Err = ResidueError;

    fn from_str(s: &str) -> Result<Self, ResidueError> {
        let bad = || ResidueError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut p = SparsePoly::zero();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (neg, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' => (false, &rest[1..]),
                _ => (false, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            if term.is_empty() {
                return Err(bad());
            }
            let (coeff, exp) = match term.find('x') {
                None => (term.parse::<IBig>().map_err(|_| bad())?, UBig::ZERO),
                Some(ix) => {
                    let c = term[..ix].trim_end_matches('*');
                    let c = if c.is_empty() { IBig::ONE } else { c.parse::<IBig>().map_err(|_| bad())? };
                    let e = &term[ix + 1..];
                    let e = match e.strip_prefix('^') {
                        Some(d) => d.parse::<UBig>().map_err(|_| bad())?,
                        None if e.is_empty() => UBig::ONE,
                        None => return Err(bad()),
                    };
                    (c, e)
                }
            };
            p.add_term(exp, if neg { -coeff } else { coeff });
        }
        Ok(p)
    }
}
