use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::numerics::{Matrix, Rational};

use super::stationary::{infer_weights, stationary_distribution, symmetrize};
use super::SpectralError;

/// Largest accepted `‖Mu − λu‖₂` for a computed eigenpair.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Eigen-structure of an averaging matrix, via its symmetrized form.
#[derive(Clone, Debug)]
pub struct FlockSpectrum {
    pub size: usize,
    pub weights: Vec<Rational>,
    pub pi: Vec<Rational>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of `M`, one per eigenvalue.
    pub vectors: Vec<Vec<f64>>,
    /// `max_{k>1} |λ_k|`.
    pub mu: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub size: usize,
    pub pi: Vec<String>,
    pub eigenvalues: Vec<f64>,
    pub mu: f64,
    pub gap: f64,
    pub residual: f64,
}

impl FlockSpectrum {
    /// `C^{1/2} u_k`: right eigenvector of `P`.
    pub fn right_eigenvector(&self, k: usize) -> Vec<f64> {
        self.vectors[k].iter().zip(&self.weights).map(|(u, c)| u * c.to_f64().sqrt()).collect()
    }

    /// `C^{-1/2} u_k`: left eigenvector of `P`.
    pub fn left_eigenvector(&self, k: usize) -> Vec<f64> {
        self.vectors[k].iter().zip(&self.weights).map(|(u, c)| u / c.to_f64().sqrt()).collect()
    }

    pub fn report(&self) -> SpectrumReport {
        SpectrumReport {
            size: self.size,
            pi: self.pi.iter().map(Rational::to_string).collect(),
            eigenvalues: self.eigenvalues.clone(),
            mu: self.mu,
            gap: 1.0 - self.mu,
            residual: self.residual,
        }
    }
}

/// Full eigendecomposition of a connected averaging matrix `P = I − C L`.
pub fn spectrum(p: &Matrix<Rational>) -> Result<FlockSpectrum, SpectralError> {
    let weights = infer_weights(p)?;
    let pi = stationary_distribution(p, &weights)?;
    let m = symmetrize(p, &weights)?;
    let size = m.rows();
    let dm = DMatrix::from_fn(size, size, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let eig = dm.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors: Vec<Vec<f64>> = order.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect();
    let mut residual = 0.0f64;
    for (lam, u) in eigenvalues.iter().zip(&vectors) {
        let uv = nalgebra::DVector::from_column_slice(u);
        residual = residual.max((&dm * &uv - &uv * *lam).norm());
    }
    if !residual.is_finite() || residual > RESIDUAL_TOLERANCE {
        return Err(SpectralError::Residual { residual });
    }
    let mu = eigenvalues.iter().skip(1).fold(0.0f64, |a, l| a.max(l.abs()));
    Ok(FlockSpectrum { size, weights, pi, eigenvalues, vectors, mu, residual })
}

/// Closed-form eigen data of the lazy walk on a path of `2^j` birds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSpectrum {
    pub j: u32,
    pub size: usize,
    pub theta: u64,
    /// `λ_k = 1/3 + (2/3)cos(π(k−1)/(2^j−1))`, `k = 1..2^j`.
    pub lambdas: Vec<f64>,
    /// Scaled powers `ε_k λ_k^θ / (2^j − 1)` for `k = 2..2^j`.
    pub mus: Vec<f64>,
    /// Unnormalized right eigenvectors for `k = 2..2^j`.
    pub vectors: Vec<Vec<f64>>,
}

pub fn path_spectrum(j: u32, theta: u64) -> PathSpectrum {
    assert!((1..=20).contains(&j), "height out of range");
    let m = 1usize << j;
    let denom = (m - 1) as f64;
    let lambdas: Vec<f64> = (1..=m).map(|k| 1.0 / 3.0 + 2.0 / 3.0 * (PI * (k - 1) as f64 / denom).cos()).collect();
    let mut mus = Vec::with_capacity(m - 1);
    let mut vectors = Vec::with_capacity(m - 1);
    for k in 2..=m {
        let eps = if k < m { 2.0 } else { 1.0 };
        mus.push(eps / denom * lambdas[k - 1].powf(theta as f64));
        let mut u: Vec<f64> = (0..m).map(|i| (PI * ((k - 1) * i) as f64 / denom).cos()).collect();
        u[m - 1] = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        u[0] = 1.0;
        vectors.push(u);
    }
    PathSpectrum { j, size: m, theta, lambdas, mus, vectors }
}

impl PathSpectrum {
    /// `P^θ = 𝟙πᵀ + Σ_{k≥2} μ_k u_k (u_k − ½ z_{k−1})ᵀ` with `z_l = (1, 0, …, 0, (−1)^l)`.
    pub fn reconstruct(&self) -> Matrix<f64> {
        let m = self.size;
        let denom = (m - 1) as f64;
        let mut out = Matrix::zeros(m, m);
        for i in 0..m {
            for c in 0..m {
                out[(i, c)] = if c == 0 || c == m - 1 { 0.5 / denom } else { 1.0 / denom };
            }
        }
        for (idx, (mu, u)) in self.mus.iter().zip(&self.vectors).enumerate() {
            let k = idx + 2;
            let mut w = u.clone();
            w[0] -= 0.5;
            w[m - 1] -= 0.5 * if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..m {
                for c in 0..m {
                    out[(i, c)] += mu * u[i] * w[c];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{transition, ConfidencePolicy, FlockNetwork};
    use crate::numerics::mat_power;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn lazy_pair_and_four_path() {
        let p2 = transition(&FlockNetwork::path(2), &ConfidencePolicy::LazyWalk).unwrap().p;
        assert!(close(&spectrum(&p2).unwrap().eigenvalues, &[1.0, -1.0 / 3.0]));
        let p4 = transition(&FlockNetwork::path(4), &ConfidencePolicy::LazyWalk).unwrap().p;
        let s = spectrum(&p4).unwrap();
        assert!(close(&s.eigenvalues, &[1.0, 2.0 / 3.0, 0.0, -1.0 / 3.0]));
        assert!((s.mu - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stretching_matrix() {
        let p = Matrix::<Rational>::parse("12/15 3/15\n10/15 5/15").unwrap();
        let s = spectrum(&p).unwrap();
        assert!(close(&s.eigenvalues, &[1.0, 2.0 / 15.0]));
        let img = p.to_f64().mat_vec(&[1.0, 0.0]).unwrap();
        let norm = (img[0] * img[0] + img[1] * img[1]).sqrt();
        assert!((norm - 244f64.sqrt() / 15.0).abs() < 1e-12 && norm > 1.04);
    }

    #[test]
    fn eigenvectors_are_right_and_left() {
        let p = transition(&FlockNetwork::path(3), &ConfidencePolicy::Vicsek).unwrap().p;
        let s = spectrum(&p).unwrap();
        let pf = p.to_f64();
        for k in 0..3 {
            let r = s.right_eigenvector(k);
            let pr = pf.mat_vec(&r).unwrap();
            assert!(pr.iter().zip(&r).all(|(a, b)| (a - s.eigenvalues[k] * b).abs() < 1e-12));
            let l = s.left_eigenvector(k);
            let lp = pf.vec_mat(&l).unwrap();
            assert!(lp.iter().zip(&l).all(|(a, b)| (a - s.eigenvalues[k] * b).abs() < 1e-12));
        }
        let trace: f64 = (0..3).map(|i| pf[(i, i)]).sum();
        assert!((s.eigenvalues.iter().sum::<f64>() - trace).abs() < 1e-12);
    }

    #[test]
    fn closed_form_path_eigenvalues() {
        assert!(close(&path_spectrum(1, 1).lambdas, &[1.0, -1.0 / 3.0]));
        assert!(close(&path_spectrum(2, 1).lambdas, &[1.0, 2.0 / 3.0, 0.0, -1.0 / 3.0]));
    }

    #[test]
    fn closed_form_reconstructs_powers() {
        for j in 1..=5u32 {
            let p = transition(&FlockNetwork::path(1 << j), &ConfidencePolicy::LazyWalk).unwrap().p;
            for s in [1u64, 10, 100] {
                let exact = mat_power(&p, s).unwrap().to_f64();
                let rec = path_spectrum(j, s).reconstruct();
                let err = exact.sub(&rec).unwrap().max_abs_f64();
                assert!(err <= 1e-10, "j={j} s={s} err={err}");
            }
        }
    }
}
