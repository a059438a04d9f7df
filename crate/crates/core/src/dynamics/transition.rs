use dashu_int::{IBig, UBig};

use crate::numerics::{lcm, Matrix, Rational};

use super::network::{laplacian, FlockNetwork};
use super::policy::ConfidencePolicy;
use super::DynamicsError;

/// Row-stochastic averaging matrix `P = I − C L` with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub p: Matrix<Rational>,
    pub c: Vec<Rational>,
    pub network: FlockNetwork,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.p.rows()
    }

    /// `P = N / D` with integer `N` (row-major) and `D` the lcm of entry denominators.
    pub fn integer_form(&self) -> (Vec<IBig>, UBig) {
        integer_form(&self.p)
    }

    /// Restriction to a flock, relabelled `0..members.len()`.
    pub fn block(&self, members: &[usize]) -> Matrix<Rational> {
        self.p.select(members, members)
    }
}

pub fn integer_form(p: &Matrix<Rational>) -> (Vec<IBig>, UBig) {
    let mut d = UBig::ONE;
    for x in p.entries() {
        d = lcm(&d, x.denom());
    }
    let dd = IBig::from(d.clone());
    let n = p
        .entries()
        .iter()
        .map(|x| x.numer() * (&dd / IBig::from(x.denom().clone())))
        .collect();
    (n, d)
}

pub fn transition(g: &FlockNetwork, policy: &ConfidencePolicy) -> Result<TransitionMatrix, DynamicsError> {
    let c = policy.coefficients(g)?;
    let l: Matrix<Rational> = laplacian(g);
    let n = g.n();
    let mut p = Matrix::identity(n);
    for i in 0..n {
        if g.degree(i) == 0 {
            continue;
        }
        for j in 0..n {
            let v = &p[(i, j)] - &(&c[i] * &l[(i, j)]);
            p[(i, j)] = v;
        }
    }
    Ok(TransitionMatrix { p, c, network: g.clone() })
}
