use serde::Serialize;

use crate::numerics::{Matrix, Scalar};

use super::SpectralError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErgodicityCoeffs {
    pub tau1: f64,
    pub tau2: f64,
}

fn is_stochastic<S: Scalar>(a: &Matrix<S>) -> bool {
    let tol = if S::MODE == crate::numerics::Mode::Exact { 0.0 } else { 1e-12 };
    a.entries().iter().all(|x| *x >= S::zero())
        && a.row_sums().into_iter().all(|s| s.close_to(&S::one(), tol))
}

/// Half the largest ℓ₁ distance between rows; `1 − min_{i,j} Σ_k min(a_ik, a_jk)` for stochastic input.
pub fn tau1<S: Scalar>(a: &Matrix<S>) -> S {
    let n = a.rows();
    let stochastic = is_stochastic(a);
    let mut best = S::zero();
    for i in 0..n {
        for j in i + 1..n {
            let (ri, rj) = (a.row(i), a.row(j));
            let v = if stochastic {
                let overlap = ri
                    .iter()
                    .zip(rj)
                    .map(|(x, y)| if x < y { x.clone() } else { y.clone() })
                    .fold(S::zero(), |acc, m| acc + m);
                S::one() - overlap
            } else {
                let l1 = ri.iter().zip(rj).fold(S::zero(), |acc, (x, y)| acc + (x.clone() - y.clone()).abs());
                l1 / S::from_i64(2)
            };
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Largest squared ℓ₂ distance between rows.
pub fn tau2_sq<S: Scalar>(a: &Matrix<S>) -> S {
    let n = a.rows();
    let mut best = S::zero();
    for i in 0..n {
        for j in i + 1..n {
            let v = a.row(i).iter().zip(a.row(j)).fold(S::zero(), |acc, (x, y)| {
                let d = x.clone() - y.clone();
                acc + d.clone() * d
            });
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// ℓ₂ diameter of the rows.
pub fn tau2<S: Scalar>(a: &Matrix<S>) -> f64 {
    tau2_sq(a).to_f64().sqrt()
}

pub fn ergodicity<S: Scalar>(a: &Matrix<S>) -> ErgodicityCoeffs {
    ErgodicityCoeffs { tau1: tau1(a).to_f64(), tau2: tau2(a) }
}

/// `A_k ⋯ A_2 A_1` for the time-ordered sequence `A_1, …, A_k`.
pub fn backward_product<S: Scalar>(seq: &[Matrix<S>]) -> Result<Matrix<S>, SpectralError> {
    let (first, rest) = seq.split_first().ok_or_else(|| SpectralError::Dimension("empty product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, m| Ok(m.matmul(&acc)?))
}

/// `A_1 A_2 ⋯ A_k`.
pub fn forward_product<S: Scalar>(seq: &[Matrix<S>]) -> Result<Matrix<S>, SpectralError> {
    let (first, rest) = seq.split_first().ok_or_else(|| SpectralError::Dimension("empty product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, m| Ok(acc.matmul(m)?))
}
