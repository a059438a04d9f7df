use std::cmp::Ordering;

use crate::numerics::{power_sum, BigFraction, Matrix, Mode, Rational, Scalar};

use super::events::PerturbationEvent;
use super::network::{sqrt_gap_below, FlockNetwork};
use super::policy::ConfidencePolicy;
use super::transition::{transition, TransitionMatrix};
use super::DynamicsError;

/// Positions `x(t)` and velocities `v(t)` of `n` birds in `d`-space.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration<S: Scalar> {
    pub tick: u64,
    pub x: Matrix<S>,
    pub v: Matrix<S>,
}

impl<S: Scalar> Configuration<S> {
    pub fn new(x: Matrix<S>, v: Matrix<S>) -> Result<Self, DynamicsError> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(DynamicsError::Dimension("need n ≥ 1 birds and d ≥ 1 coordinates".into()));
        }
        if x.rows() != v.rows() || x.cols() != v.cols() {
            return Err(DynamicsError::Dimension(format!(
                "positions {}x{} vs velocities {}x{}",
                x.rows(),
                x.cols(),
                v.rows(),
                v.cols()
            )));
        }
        Ok(Configuration { tick: 0, x, v })
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Configuration<T> {
        Configuration { tick: self.tick, x: self.x.map(&f), v: self.v.map(&f) }
    }

    fn sq_dist(&self, i: usize, j: usize) -> S {
        (0..self.x.cols()).fold(S::zero(), |acc, k| {
            let dx = self.x[(i, k)].clone() - self.x[(j, k)].clone();
            acc + dx.clone() * dx
        })
    }
}

impl Configuration<Rational> {
    pub fn to_approx(&self, precision: usize) -> Configuration<crate::numerics::Approx> {
        self.convert(|r| crate::numerics::Approx::from_rational_prec(r, precision))
    }
}

/// One flock that keeps its transition block during a multi-tick jump.
#[derive(Clone, Debug)]
pub struct JumpBlock {
    pub members: Vec<usize>,
    pub p: Matrix<Rational>,
    pub pi: Vec<Rational>,
    pub gamma: Matrix<Rational>,
}

/// State interface the run driver needs from a number representation.
pub trait FlockState: Clone + Send + 'static {
    type JumpCache: Default + Send;

    fn n(&self) -> usize;
    fn d(&self) -> usize;
    fn tick(&self) -> u64;
    fn mode(&self) -> Mode;
    /// Compares `‖x_i − x_j‖₂` with `r`.
    fn compare_distance(&self, i: usize, j: usize, r: &Rational) -> Ordering;
    /// Whether `|dist_now(i,j) − dist_prev(i,j)| < eps`.
    fn keeps_edge(&self, prev: &Self, i: usize, j: usize, eps: &Rational) -> bool;
    /// Compares coordinate `k` of birds `i` and `j`.
    fn position_order(&self, i: usize, j: usize, k: usize) -> Ordering;
    /// `v ← P v`, `x ← x + v`, `t ← t + 1`.
    fn step(&mut self, p: &TransitionMatrix);
    /// Scales the members' velocities by `alpha`; returns the ℓ₂ norm of the change.
    fn perturb(&mut self, members: &[usize], alpha: &[Rational]) -> f64;
    /// Advances `s` ticks under fixed flock blocks.
    fn jump(&mut self, blocks: &[JumpBlock], s: u64, cache: &mut Self::JumpCache) -> Result<(), DynamicsError>;
    fn distance_f64(&self, i: usize, j: usize) -> f64;
    fn velocity_gap_f64(&self, i: usize, j: usize) -> f64;
    fn position_f64(&self, i: usize, k: usize) -> f64;
    fn velocity_f64(&self, i: usize, k: usize) -> f64;
    fn position_text(&self, i: usize, k: usize) -> String;
    fn velocity_text(&self, i: usize, k: usize) -> String;
    /// `Σ_a w_a v_{members[a], k}` exactly, when the representation is exact.
    fn weighted_velocity(&self, members: &[usize], weights: &[Rational], k: usize) -> Option<BigFraction>;
    fn weighted_velocity_f64(&self, members: &[usize], weights: &[Rational], k: usize) -> f64 {
        members.iter().zip(weights).map(|(&i, w)| w.to_f64() * self.velocity_f64(i, k)).sum()
    }
    fn to_rational(&self) -> Option<Configuration<Rational>>;
    /// Largest operand size in bits (exact) or 0.
    fn size_bits(&self) -> usize {
        0
    }
}

impl<S: Scalar> FlockState for Configuration<S> {
    type JumpCache = ();

    fn n(&self) -> usize {
        self.x.rows()
    }

    fn d(&self) -> usize {
        self.x.cols()
    }

    fn tick(&self) -> u64 {
        self.tick
    }

    fn mode(&self) -> Mode {
        S::MODE
    }

    fn compare_distance(&self, i: usize, j: usize, r: &Rational) -> Ordering {
        let r = S::from_rational(r);
        self.sq_dist(i, j).partial_cmp(&(r.clone() * r)).unwrap_or(Ordering::Greater)
    }

    fn keeps_edge(&self, prev: &Self, i: usize, j: usize, eps: &Rational) -> bool {
        sqrt_gap_below(&self.sq_dist(i, j), &prev.sq_dist(i, j), &S::from_rational(eps))
    }

    fn position_order(&self, i: usize, j: usize, k: usize) -> Ordering {
        self.x[(i, k)].partial_cmp(&self.x[(j, k)]).unwrap_or(Ordering::Equal)
    }

    fn step(&mut self, p: &TransitionMatrix) {
        let ps = p.p.map(S::from_rational);
        self.v = ps.matmul(&self.v).expect("transition matches state size");
        self.x = self.x.add(&self.v).expect("shapes agree");
        self.tick += 1;
    }

    fn perturb(&mut self, members: &[usize], alpha: &[Rational]) -> f64 {
        let mut sq = 0.0;
        for &i in members {
            for (k, a) in alpha.iter().enumerate() {
                let old = self.v[(i, k)].clone();
                let new = old.clone() * S::from_rational(a);
                let dv = (new.clone() - old).to_f64();
                sq += dv * dv;
                self.v[(i, k)] = new;
            }
        }
        sq.sqrt()
    }

    fn jump(&mut self, blocks: &[JumpBlock], s: u64, _cache: &mut ()) -> Result<(), DynamicsError> {
        for b in blocks {
            let p = b.p.map(S::from_rational);
            let (sum, pow) = power_sum(&p, s)?;
            let vb = self.v.select(&b.members, &(0..self.d()).collect::<Vec<_>>());
            let dx = sum.matmul(&vb)?;
            let nv = pow.matmul(&vb)?;
            for (a, &i) in b.members.iter().enumerate() {
                for k in 0..self.d() {
                    self.x[(i, k)] = self.x[(i, k)].clone() + dx[(a, k)].clone();
                    self.v[(i, k)] = nv[(a, k)].clone();
                }
            }
        }
        self.tick += s;
        Ok(())
    }

    fn distance_f64(&self, i: usize, j: usize) -> f64 {
        (0..self.d())
            .map(|k| {
                let dx = (self.x[(i, k)].clone() - self.x[(j, k)].clone()).to_f64();
                dx * dx
            })
            .sum::<f64>()
            .sqrt()
    }

    fn velocity_gap_f64(&self, i: usize, j: usize) -> f64 {
        (0..self.d())
            .map(|k| {
                let dv = (self.v[(i, k)].clone() - self.v[(j, k)].clone()).to_f64();
                dv * dv
            })
            .sum::<f64>()
            .sqrt()
    }

    fn position_f64(&self, i: usize, k: usize) -> f64 {
        self.x[(i, k)].to_f64()
    }

    fn velocity_f64(&self, i: usize, k: usize) -> f64 {
        self.v[(i, k)].to_f64()
    }

    fn position_text(&self, i: usize, k: usize) -> String {
        self.x[(i, k)].to_string()
    }

    fn velocity_text(&self, i: usize, k: usize) -> String {
        self.v[(i, k)].to_string()
    }

    fn weighted_velocity(&self, members: &[usize], weights: &[Rational], k: usize) -> Option<BigFraction> {
        let mut acc = Rational::zero();
        for (&i, w) in members.iter().zip(weights) {
            acc += &(w * self.v[(i, k)].as_rational()?);
        }
        Some(BigFraction::from_rational(&acc))
    }

    fn weighted_velocity_f64(&self, members: &[usize], weights: &[Rational], k: usize) -> f64 {
        // accumulate in the field itself so extended precision survives cancellation
        let mut acc = S::zero();
        for (&i, w) in members.iter().zip(weights) {
            acc = acc + S::from_rational(w) * self.v[(i, k)].clone();
        }
        acc.to_f64()
    }

    fn to_rational(&self) -> Option<Configuration<Rational>> {
        let conv = |m: &Matrix<S>| -> Option<Matrix<Rational>> {
            let data = m.entries().iter().map(|e| e.as_rational().cloned()).collect::<Option<Vec<_>>>()?;
            Matrix::from_vec(m.rows(), m.cols(), data).ok()
        };
        Some(Configuration { tick: self.tick, x: conv(&self.x)?, v: conv(&self.v)? })
    }
}

/// One noise-free tick: `v' = P v`, `x' = x + v'`, where `P` comes from `g` and `policy`.
pub fn step<S: Scalar>(
    cfg: &Configuration<S>,
    g: &FlockNetwork,
    policy: &ConfidencePolicy,
) -> Result<Configuration<S>, DynamicsError> {
    if g.n() != cfg.n() {
        return Err(DynamicsError::Dimension(format!("network on {} vertices, {} birds", g.n(), cfg.n())));
    }
    let p = transition(g, policy)?;
    let mut out = cfg.clone();
    out.step(&p);
    Ok(out)
}

/// Applies `ev` to the velocities of whole flocks of `g`; positions and tick are unchanged.
pub fn apply_perturbation<S: Scalar>(
    cfg: &Configuration<S>,
    ev: &PerturbationEvent,
    g: &FlockNetwork,
) -> Result<Configuration<S>, DynamicsError> {
    ev.validate(g, cfg.d())?;
    let mut out = cfg.clone();
    out.perturb(&ev.members, &ev.alpha);
    Ok(out)
}
