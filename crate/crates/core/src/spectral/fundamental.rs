use crate::numerics::{inverse, power_sum, Matrix, Scalar};

use super::SpectralError;

fn ones_pi<S: Scalar>(pi: &[S]) -> Matrix<S> {
    let m = pi.len();
    let mut out = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = pi[j].clone();
        }
    }
    out
}

fn check_len<S: Scalar>(p: &Matrix<S>, pi: &[S]) -> Result<(), SpectralError> {
    if !p.is_square() || p.rows() != pi.len() {
        return Err(SpectralError::Dimension(format!("{}x{} matrix with {} weights", p.rows(), p.cols(), pi.len())));
    }
    Ok(())
}

/// `Γ = (I − 𝟙πᵀ | 0)(I − P | 𝟙)⁻¹`, where `| ·` replaces the last column.
pub fn gamma<S: Scalar>(p: &Matrix<S>, pi: &[S]) -> Result<Matrix<S>, SpectralError> {
    check_len(p, pi)?;
    let m = p.rows();
    let mut bordered = Matrix::identity(m).sub(p)?;
    let mut target = Matrix::identity(m).sub(&ones_pi(pi))?;
    for i in 0..m {
        bordered[(i, m - 1)] = S::one();
        target[(i, m - 1)] = S::zero();
    }
    Ok(target.matmul(&inverse(&bordered)?)?)
}

/// `Γ = −𝟙πᵀ + (I − P + 𝟙πᵀ)⁻¹`.
pub fn gamma_via_inverse<S: Scalar>(p: &Matrix<S>, pi: &[S]) -> Result<Matrix<S>, SpectralError> {
    check_len(p, pi)?;
    let op = ones_pi(pi);
    let core = Matrix::identity(p.rows()).sub(p)?.add(&op)?;
    Ok(inverse(&core)?.sub(&op)?)
}

/// `Γ_t = −𝟙πᵀ t + Σ_{s<t} Pˢ`.
pub fn gamma_partial<S: Scalar>(p: &Matrix<S>, pi: &[S], t: u64) -> Result<Matrix<S>, SpectralError> {
    check_len(p, pi)?;
    let m = p.rows();
    let mut sum = Matrix::identity(m);
    if t == 0 {
        return Ok(Matrix::zeros(m, m));
    }
    if t > 1 {
        sum = sum.add(&power_sum(p, t - 1)?.0)?;
    }
    let t = S::from_i64(i64::try_from(t).map_err(|_| SpectralError::Dimension("t too large".into()))?);
    Ok(sum.sub(&ones_pi(pi).scale(&t))?)
}

/// `(π ⊗ I_d)ᵀ` applied to an `m × d` block: the π-weighted average row.
pub fn mass_center<S: Scalar>(x: &Matrix<S>, pi: &[S]) -> Result<Vec<S>, SpectralError> {
    if x.rows() != pi.len() {
        return Err(SpectralError::Dimension(format!("{} rows with {} weights", x.rows(), pi.len())));
    }
    Ok(x.vec_mat(pi)?)
}

/// Limit of `x(t) − 𝟙·m_π[x(t)]` and the per-tick drift of the mass center.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitConfiguration<S: Scalar> {
    pub relative: Matrix<S>,
    pub drift: Vec<S>,
}

pub fn limit_configuration<S: Scalar>(
    x0: &Matrix<S>,
    v1: &Matrix<S>,
    p: &Matrix<S>,
    pi: &[S],
) -> Result<LimitConfiguration<S>, SpectralError> {
    let g = gamma(p, pi)?;
    let centered = Matrix::identity(p.rows()).sub(&ones_pi(pi))?.matmul(x0)?;
    Ok(LimitConfiguration { relative: centered.add(&g.matmul(v1)?)?, drift: mass_center(v1, pi)? })
}

/// `Σ π_i (ξ_i − Σ π_j ξ_j)²`.
pub fn lyapunov_variance<S: Scalar>(xi: &[S], pi: &[S]) -> S {
    let mean = xi.iter().zip(pi).fold(S::zero(), |acc, (x, w)| acc + x.clone() * w.clone());
    xi.iter().zip(pi).fold(S::zero(), |acc, (x, w)| {
        let d = x.clone() - mean.clone();
        acc + w.clone() * d.clone() * d
    })
}

/// Whether `var(Pξ) ≤ μ²·var(ξ)` up to rounding.
pub fn check_contraction(p: &Matrix<f64>, pi: &[f64], xi: &[f64], mu: f64) -> bool {
    let Ok(pxi) = p.mat_vec(xi) else { return false };
    let before = lyapunov_variance(xi, pi);
    lyapunov_variance(&pxi, pi) <= mu * mu * before + 1e-12 * (1.0 + before)
}
