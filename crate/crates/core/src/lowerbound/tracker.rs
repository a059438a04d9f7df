use std::ops::ControlFlow;

use serde::Serialize;

use crate::dynamics::{AppliedEvent, ConfidencePolicy, FlockState, Observer, TickInfo, TransitionMatrix};
use crate::numerics::{BigFraction, Rational};
use crate::spectral::stationary_from_weights;

use super::predict::{log10_abs, Height1Prediction};

/// A flock of `2^height` consecutive birds at the tick it appeared.
#[derive(Clone, Debug, Serialize)]
pub struct MergeRecord {
    pub height: u32,
    pub tick: u64,
    pub members: Vec<usize>,
    /// Stationary velocity along the first axis.
    #[serde(skip)]
    pub m: Option<BigFraction>,
    pub m_f64: f64,
    pub m_log10: f64,
    pub sign: i8,
    /// `s` with left half velocities equal to `s` times the right half, bit for bit.
    pub mirror: Option<i8>,
    /// Distance across the edge that joined the two halves.
    pub join_gap: f64,
}

/// Distance between a flipped flock and its sibling, tracked until they merge.
#[derive(Clone, Debug, Serialize)]
pub struct ApproachCheck {
    pub flip_tick: u64,
    pub flock: Vec<usize>,
    pub sibling: Vec<usize>,
    /// First visited tick at which the velocity spread inside both flocks fell below their relative drift.
    pub settled: Option<u64>,
    pub samples: u64,
    /// Ticks after settling at which the gap failed to shrink.
    pub increases: u64,
    pub last_gap: f64,
    pub merged: Option<u64>,
}

impl ApproachCheck {
    pub fn pass(&self) -> bool {
        self.settled.is_some() && self.increases == 0
    }
}

/// Records merges, checks the pair-phase closed forms, and follows flipped siblings.
pub struct MergeObserver {
    policy: ConfidencePolicy,
    stop_size: usize,
    height1: Option<Height1Prediction>,
    pub merges: Vec<MergeRecord>,
    pub approaches: Vec<ApproachCheck>,
    /// `Some(false)` once a pair-phase position differs from its closed form.
    pub trajectory_ok: Option<bool>,
    pub trajectory_ticks: u64,
    pub failed: Option<String>,
}

impl MergeObserver {
    pub fn new(policy: ConfidencePolicy, stop_size: usize, height1: Option<Height1Prediction>) -> Self {
        MergeObserver {
            policy,
            stop_size,
            height1,
            merges: Vec::new(),
            approaches: Vec::new(),
            trajectory_ok: None,
            trajectory_ticks: 0,
            failed: None,
        }
    }

    fn spread<St: FlockState>(state: &St, f: &[usize]) -> f64 {
        let mut s: f64 = 0.0;
        for (a, &i) in f.iter().enumerate() {
            for &j in &f[a + 1..] {
                s = s.max(state.velocity_gap_f64(i, j));
            }
        }
        s
    }

    fn record_merge<St: FlockState>(&mut self, info: &TickInfo, state: &St, f: &[usize]) -> Result<(), String> {
        let c = self.policy.coefficients(&info.network).map_err(|e| e.to_string())?;
        let c: Vec<Rational> = f.iter().map(|&i| c[i].clone()).collect();
        let pi = stationary_from_weights(&c).map_err(|e| e.to_string())?;
        let m = state.weighted_velocity(f, &pi, 0);
        // summing doubles would cancel catastrophically once the halves mirror each other
        let m_f64 = m.as_ref().map_or_else(|| state.weighted_velocity_f64(f, &pi, 0), BigFraction::to_f64);
        let m_log10 = m.as_ref().map_or(m_f64.abs().log10(), log10_abs);
        let sign = m.as_ref().map_or(m_f64.partial_cmp(&0.0).map_or(0, |o| o as i8), |m| m.signum() as i8);
        let half = f.len() / 2;
        let one = [Rational::one()];
        let vel = |i: usize| state.weighted_velocity(&[i], &one, 0);
        let mut mirror = None;
        for s in [-1i8, 1] {
            let same = (0..half).all(|a| match (vel(f[a]), vel(f[half + a])) {
                (Some(l), Some(r)) => if s < 0 { l == r.neg() } else { l == r },
                _ => false,
            });
            if same {
                mirror = Some(s);
                break;
            }
        }
        self.merges.push(MergeRecord {
            height: f.len().trailing_zeros(),
            tick: info.tick,
            members: f.to_vec(),
            m,
            m_f64,
            m_log10,
            sign,
            mirror,
            join_gap: if half > 0 { state.distance_f64(f[half - 1], f[half]) } else { 0.0 },
        });
        Ok(())
    }
}

impl<St: FlockState> Observer<St> for MergeObserver {
    fn on_tick(&mut self, info: &TickInfo, state: &St, _p: &TransitionMatrix, events: &[AppliedEvent]) -> ControlFlow<()> {
        let t = info.tick;
        if let Some(h) = &self.height1 {
            if t <= h.theta1 {
                if let Some(cfg) = state.to_rational() {
                    let ok = (0..state.n()).all(|i| cfg.x[(i, 0)] == h.position(i, t));
                    self.trajectory_ok = Some(self.trajectory_ok.unwrap_or(true) && ok);
                    self.trajectory_ticks += 1;
                }
            }
        }
        let mut stop = false;
        for &k in &info.formed {
            let f = &info.flocks[k];
            if f.len() < 2 || !f.len().is_power_of_two() {
                continue;
            }
            if let Err(e) = self.record_merge(info, state, f) {
                self.failed = Some(e);
                return ControlFlow::Break(());
            }
            if f.len() >= self.stop_size {
                stop = true;
            }
        }
        for a in self.approaches.iter_mut().filter(|a| a.merged.is_none()) {
            let label = |i: usize| info.flocks.iter().position(|f| f.contains(&i));
            if label(a.flock[0]) == label(a.sibling[0]) {
                a.merged = Some(t);
                continue;
            }
            let (l, r) = if a.flock[0] < a.sibling[0] { (&a.flock, &a.sibling) } else { (&a.sibling, &a.flock) };
            let (end_l, start_r) = (*l.last().expect("nonempty"), r[0]);
            let gap = state.distance_f64(end_l, start_r);
            if a.settled.is_some() {
                a.samples += 1;
                if gap >= a.last_gap {
                    a.increases += 1;
                }
            } else {
                let drift = state.velocity_gap_f64(end_l, start_r);
                let inner = Self::spread(state, l) + Self::spread(state, r);
                let closing = state.velocity_f64(end_l, 0) > state.velocity_f64(start_r, 0);
                if inner < drift && closing {
                    a.settled = Some(t);
                }
            }
            a.last_gap = gap;
        }
        for ev in events {
            let size = ev.members.len();
            let first = ev.members[0];
            let sibling: Vec<usize> = if (first / size) % 2 == 0 { (first + size..first + 2 * size).collect() } else { (first - size..first).collect() };
            if sibling.iter().all(|&i| i < state.n()) {
                self.approaches.push(ApproachCheck {
                    flip_tick: t,
                    flock: ev.members.clone(),
                    sibling,
                    settled: None,
                    samples: 0,
                    increases: 0,
                    last_gap: f64::INFINITY,
                    merged: None,
                });
            }
        }
        if stop {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }
}
