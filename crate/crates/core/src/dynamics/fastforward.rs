use std::collections::HashMap;

use crate::numerics::{inverse, solve, Matrix, Rational};

use super::state::{FlockState, JumpBlock};
use super::transition::TransitionMatrix;
use super::DynamicsError;

/// Settings for skipping ticks over which the network provably stays fixed.
#[derive(Clone, Debug)]
pub struct FastForward {
    /// Extra distance thresholds (besides 1) no pair may cross inside a jump.
    pub watch_radii: Vec<f64>,
    /// Jumps shorter than this are replaced by single steps.
    pub min_jump: u64,
    /// No jump starts before this tick.
    pub not_before: u64,
}

impl Default for FastForward {
    fn default() -> Self {
        FastForward { watch_radii: Vec::new(), min_jump: 8, not_before: 0 }
    }
}

/// Stationary distribution of an irreducible stochastic block: `πᵀ P = πᵀ`, `Σπ = 1`.
pub fn stationary_of(p: &Matrix<Rational>) -> Result<Vec<Rational>, DynamicsError> {
    let m = p.rows();
    let mut a = Matrix::<Rational>::identity(m).sub(p)?.transpose();
    for j in 0..m {
        a[(m - 1, j)] = Rational::one();
    }
    let mut b = Matrix::zeros(m, 1);
    b[(m - 1, 0)] = Rational::one();
    Ok(solve(&a, &b)?.col(0))
}

/// `Γ = −𝟙πᵀ + (I − P + 𝟙πᵀ)⁻¹`.
pub fn fundamental_of(p: &Matrix<Rational>, pi: &[Rational]) -> Result<Matrix<Rational>, DynamicsError> {
    let m = p.rows();
    let mut ones_pi = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            ones_pi[(i, j)] = pi[j].clone();
        }
    }
    let core = Matrix::identity(m).sub(p)?.add(&ones_pi)?;
    Ok(inverse(&core)?.sub(&ones_pi)?)
}

/// Per-block π and Γ, computed once per distinct block.
#[derive(Default)]
pub struct BlockCache {
    map: HashMap<Matrix<Rational>, (Vec<Rational>, Matrix<Rational>)>,
}

impl BlockCache {
    pub fn blocks(&mut self, p: &TransitionMatrix, flocks: &[Vec<usize>]) -> Result<Vec<JumpBlock>, DynamicsError> {
        flocks
            .iter()
            .map(|f| {
                let pb = p.block(f);
                let (pi, gamma) = match self.map.get(&pb) {
                    Some(v) => v.clone(),
                    None => {
                        let pi = stationary_of(&pb)?;
                        let gamma = fundamental_of(&pb, &pi)?;
                        self.map.insert(pb.clone(), (pi.clone(), gamma.clone()));
                        (pi, gamma)
                    }
                };
                Ok(JumpBlock { members: f.clone(), p: pb, pi, gamma })
            })
            .collect()
    }
}

/// Number of ticks the current network is guaranteed to persist.
///
/// Velocities of a flock stay inside the convex hull of their current values, so
/// the distance between birds of flocks `A` and `B` moves by at most the largest
/// current velocity gap between `A` and `B` per tick. A jump is safe while that
/// drift cannot reach 1 or any watch radius. Returns `u64::MAX` when nothing moves.
pub fn safe_jump_length<St: FlockState>(state: &St, flocks: &[Vec<usize>], watch_radii: &[f64]) -> u64 {
    let n = state.n();
    let mut label = vec![0; n];
    for (k, f) in flocks.iter().enumerate() {
        for &i in f {
            label[i] = k;
        }
    }
    let nf = flocks.len();
    let mut diam = vec![0.0f64; nf * nf];
    for i in 0..n {
        for j in i + 1..n {
            let g = state.velocity_gap_f64(i, j);
            let (a, b) = (label[i], label[j]);
            diam[a * nf + b] = diam[a * nf + b].max(g);
            diam[b * nf + a] = diam[b * nf + a].max(g);
        }
    }
    let mut best = u64::MAX;
    for i in 0..n {
        for j in i + 1..n {
            let rate = diam[label[i] * nf + label[j]];
            if rate == 0.0 {
                continue;
            }
            let dist = state.distance_f64(i, j);
            let margin = std::iter::once(1.0)
                .chain(watch_radii.iter().copied())
                .map(|r| (dist - r).abs())
                .fold(f64::INFINITY, f64::min);
            let room = margin - 1e-12;
            if room <= 0.0 {
                return 0;
            }
            let s = (room / (rate * (1.0 + 1e-9))).floor();
            let s = if s >= u64::MAX as f64 { u64::MAX } else { s as u64 };
            best = best.min(s);
        }
    }
    best
}
