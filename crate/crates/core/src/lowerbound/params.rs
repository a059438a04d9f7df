use dashu_int::IBig;
use serde::Serialize;

use crate::dynamics::{ConfidencePolicy, Configuration};
use crate::numerics::{Matrix, Rational};

use super::LowerBoundError;

/// Parameters of the slow-merging path instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LBParams {
    /// Number of birds, a power of two, at least 4.
    pub n: usize,
    /// Micro-speed `q`; `1/q` must be an integer congruent to 2 mod 6.
    #[serde(serialize_with = "crate::lowerbound::ser_rational")]
    pub q: Rational,
    /// Ticks between a flock's formation and its flip.
    pub lag: u64,
    /// Adds a second coordinate with unit velocity for every bird.
    pub planar: bool,
}

impl LBParams {
    pub fn new(n: usize, q: Rational, lag: u64) -> Result<Self, LowerBoundError> {
        let p = LBParams { n, q, lag, planar: false };
        p.validate()?;
        Ok(p)
    }

    /// `q = 2^{-k}`.
    pub fn power_of_two(n: usize, k: u32, lag: u64) -> Result<Self, LowerBoundError> {
        let q = Rational::new(1, IBig::from(1u8) << k as usize)?;
        Self::new(n, q, lag)
    }

    pub fn validate(&self) -> Result<(), LowerBoundError> {
        if self.n < 4 || !self.n.is_power_of_two() {
            return Err(LowerBoundError::Params(format!("n = {} is not a power of two >= 4", self.n)));
        }
        if self.lag == 0 {
            return Err(LowerBoundError::Params("lag must be positive".into()));
        }
        if !self.q.is_positive() || !self.q.numer().eq(&IBig::from(1)) {
            return Err(LowerBoundError::Params(format!("q = {} is not the reciprocal of a positive integer", self.q)));
        }
        let inv = IBig::from(self.q.denom().clone());
        if &inv % IBig::from(6) != IBig::from(2) {
            return Err(LowerBoundError::Congruence(inv.to_string()));
        }
        Ok(())
    }

    /// Tree height of the full flock, `log₂ n`.
    pub fn height(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn dim(&self) -> usize {
        if self.planar {
            2
        } else {
            1
        }
    }

    /// `(1/q + 1)/3`, odd by the congruence.
    pub fn theta1(&self) -> u64 {
        let inv: u64 = self.q.denom().try_into().unwrap_or(u64::MAX);
        (inv + 1) / 3
    }
}

/// `x(0) = (0, 2/3, 2, 8/3, …)` and `v(1) = (q, 0, −q, 0, q, 0, …)`.
pub fn initial_conditions(p: &LBParams) -> Result<Configuration<Rational>, LowerBoundError> {
    p.validate()?;
    let d = p.dim();
    let mut x = Matrix::zeros(p.n, d);
    let mut v = Matrix::zeros(p.n, d);
    for i in 0..p.n {
        let pair = (i / 2) as i64;
        x[(i, 0)] = if i % 2 == 0 { Rational::from_integer(2 * pair) } else { Rational::frac(6 * pair + 2, 3) };
        if i % 2 == 0 {
            v[(i, 0)] = if pair % 2 == 0 { p.q.clone() } else { -p.q.clone() };
        }
        if p.planar {
            v[(i, 1)] = Rational::one();
        }
    }
    Ok(Configuration::new(x, v)?)
}

/// Self-confidence `2/(3d)`: a bird keeps a third of its velocity.
pub fn lazy_policy() -> ConfidencePolicy {
    ConfidencePolicy::LazyWalk
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn congruence_is_enforced() {
        assert!(LBParams::power_of_two(8, 5, 6).is_ok());
        assert!(matches!(LBParams::power_of_two(8, 4, 6), Err(LowerBoundError::Congruence(_))));
        assert!(LBParams::power_of_two(6, 5, 6).is_err());
        assert!(LBParams::power_of_two(8, 5, 0).is_err());
        assert!(LBParams::new(8, Rational::frac(3, 32), 6).is_err());
    }

    #[test]
    fn theta1_for_q_one_thirty_second() {
        assert_eq!(LBParams::power_of_two(4, 5, 6).unwrap().theta1(), 11);
    }

    #[test]
    fn eight_bird_start() {
        let p = LBParams::power_of_two(8, 5, 6).unwrap();
        let c = initial_conditions(&p).unwrap();
        let xs: Vec<String> = c.x.col(0).iter().map(Rational::to_string).collect();
        assert_eq!(xs, ["0", "2/3", "2", "8/3", "4", "14/3", "6", "20/3"]);
        let vs: Vec<String> = c.v.col(0).iter().map(Rational::to_string).collect();
        assert_eq!(vs, ["1/32", "0", "-1/32", "0", "1/32", "0", "-1/32", "0"]);
    }
}
