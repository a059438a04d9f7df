use std::collections::BTreeMap;

use crate::numerics::Rational;

use super::network::FlockNetwork;
use super::DynamicsError;

/// Rule assigning each bird its self-confidence weight `c_i` from the network alone.
#[derive(Clone, Debug, PartialEq)]
pub enum ConfidencePolicy {
    /// `c_i = 1/(d_i + 1)`: plain neighborhood average.
    Vicsek,
    /// `c_i = 2/(3·max(d_i, 1))`: a bird keeps a third of its velocity.
    LazyWalk,
    /// `c_i` looked up by degree.
    Custom(BTreeMap<usize, Rational>),
}

impl ConfidencePolicy {
    /// Table policy; every entry must satisfy `0 < c·d < 1` (degree 0 entries only need `c > 0`).
    pub fn custom(table: BTreeMap<usize, Rational>) -> Result<Self, DynamicsError> {
        for (&d, c) in &table {
            check_weight(d, c)?;
        }
        Ok(ConfidencePolicy::Custom(table))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConfidencePolicy::Vicsek => "vicsek",
            ConfidencePolicy::LazyWalk => "lazy",
            ConfidencePolicy::Custom(_) => "custom",
        }
    }

    pub fn weight(&self, degree: usize) -> Result<Rational, DynamicsError> {
        let c = match self {
            ConfidencePolicy::Vicsek => Rational::frac(1, degree as i64 + 1),
            ConfidencePolicy::LazyWalk => Rational::frac(2, 3 * degree.max(1) as i64),
            ConfidencePolicy::Custom(t) => match t.get(&degree) {
                Some(c) => c.clone(),
                None if degree == 0 => Rational::one(),
                None => return Err(DynamicsError::Policy(format!("no weight for degree {degree}"))),
            },
        };
        check_weight(degree, &c)?;
        Ok(c)
    }

    /// Weights for every bird of `g`.
    pub fn coefficients(&self, g: &FlockNetwork) -> Result<Vec<Rational>, DynamicsError> {
        g.degrees().into_iter().map(|d| self.weight(d)).collect()
    }
}

impl std::str::FromStr for ConfidencePolicy {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vicsek" => Ok(ConfidencePolicy::Vicsek),
            "lazy" | "lazywalk" | "lazy_walk" | "lazy-walk" => Ok(ConfidencePolicy::LazyWalk),
            other => Err(DynamicsError::Policy(format!("unknown policy {other:?}"))),
        }
    }
}

fn check_weight(degree: usize, c: &Rational) -> Result<(), DynamicsError> {
    if !c.is_positive() {
        return Err(DynamicsError::Policy(format!("weight {c} for degree {degree} is not positive")));
    }
    if degree > 0 && c * &Rational::from_integer(degree as i64) >= Rational::one() {
        return Err(DynamicsError::Policy(format!("weight {c} times degree {degree} is not below 1")));
    }
    Ok(())
}
