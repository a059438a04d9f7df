use std::time::Instant;

use serde::Serialize;

use crate::analysis::{fusion_tree, Genealogy};
use crate::dynamics::{
    run, validate_noise, ExactState, FastForward, FlockState, HysteresisRule, NoiseBudget, Observer, RunOptions,
    StopReason, Trace,
};
use crate::numerics::{Mode, Rational};

use super::integrity::{IntegrityObserver, IntegrityReport};
use super::params::{initial_conditions, lazy_policy, LBParams};
use super::predict::{
    log10_abs, predict_chain, predict_height1, predict_m2, predict_m3, predict_theta, sign_pattern, ChainEntry, FlipMode,
    ThetaWindow,
};
use super::schedule::{FlipRecord, FlipScheduler};
use super::tracker::{ApproachCheck, MergeObserver, MergeRecord};
use super::LowerBoundError;

#[derive(Clone, Debug)]
pub struct LowerBoundOptions {
    pub mode: Mode,
    /// Mantissa bits in approximate mode.
    pub precision: usize,
    /// Maximum number of ticks advanced.
    pub budget: u64,
    pub slack: f64,
    pub flip_mode: FlipMode,
    /// Stop once a flock of this height forms; defaults to the highest height whose
    /// predicted formation tick fits the budget.
    pub stop_height: Option<u32>,
}

impl Default for LowerBoundOptions {
    fn default() -> Self {
        LowerBoundOptions {
            mode: Mode::Exact,
            precision: 256,
            budget: 10_000_000,
            slack: 0.25,
            flip_mode: FlipMode::TrueRule,
            stop_height: None,
        }
    }
}

/// Measured against predicted values at one tree height.
#[derive(Clone, Debug, Serialize)]
pub struct HeightReport {
    pub j: u32,
    pub formed: Option<u64>,
    /// `t_{j+1} − t_j`, once the next merge happened.
    pub theta: Option<u64>,
    pub m_measured: Option<f64>,
    pub m_measured_log10: Option<f64>,
    pub m_predicted_log10: Option<f64>,
    /// Exact agreement of the measured drift with the closed form.
    pub m_exact_match: Option<bool>,
    pub m_rel_error: Option<f64>,
    pub window: Option<ThetaWindow>,
    pub theta_in_window: Option<bool>,
    pub sign_expected: i8,
    pub sign_measured: Option<i8>,
    pub mirror: Option<i8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoiseCheck {
    pub tick: u64,
    pub size: usize,
    pub constant: f64,
    pub delta_norm: f64,
    pub bound: f64,
    pub since_switch: Option<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub params: LBParams,
    pub flip_mode: FlipMode,
    pub mode: String,
    pub heights: Vec<HeightReport>,
    pub merges: Vec<MergeRecord>,
    pub flips: Vec<FlipRecord>,
    pub integrity: IntegrityReport,
    pub approaches: Vec<ApproachCheck>,
    pub noise: Vec<NoiseCheck>,
    /// Every pair-phase position equals its closed form (exact mode only).
    pub trajectory_ok: Option<bool>,
    /// Gap across the first merge equals `1 − q/3` exactly.
    pub merge_gap_exact: Option<bool>,
    pub theta_ratio: Option<f64>,
    pub chain: Vec<ChainEntry>,
    pub refused: Option<String>,
    pub stop: String,
    pub last_tick: u64,
    pub stepped: u64,
    pub skipped: u64,
    pub seconds: f64,
    #[serde(skip)]
    pub genealogy: Genealogy,
    #[serde(skip)]
    pub trace: Trace,
}

impl LowerBoundReport {
    pub fn spine(&self, j: u32) -> Option<&MergeRecord> {
        self.merges.iter().find(|m| m.height == j && m.members[0] == 0)
    }

    pub fn height(&self, j: u32) -> Option<&HeightReport> {
        self.heights.iter().find(|h| h.j == j)
    }

    pub fn noise_ok(&self) -> bool {
        self.noise.iter().all(|c| c.pass)
    }

    /// Tab-separated per-height table.
    pub fn to_table(&self) -> String {
        let mut out = String::from("height\tformed\ttheta\tm_log10\tm_pred_log10\tm_exact\twindow_lo\twindow_hi\tin_window\tsign\n");
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        for h in &self.heights {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                h.j,
                opt(h.formed.map(|v| v.to_string())),
                opt(h.theta.map(|v| v.to_string())),
                opt(h.m_measured_log10.map(|v| format!("{v:.4}"))),
                opt(h.m_predicted_log10.map(|v| format!("{v:.4}"))),
                opt(h.m_exact_match.map(|v| v.to_string())),
                opt(h.window.as_ref().map(|w| format!("{:.0}", w.lo))),
                opt(h.window.as_ref().map(|w| format!("{:.0}", w.hi))),
                opt(h.theta_in_window.map(|v| v.to_string())),
                opt(h.sign_measured.map(|s| format!("{s:+}"))),
            ));
        }
        out
    }
}

/// Simulates the construction and compares every measurable quantity to its prediction.
pub fn run_lowerbound(p: &LBParams, opts: &LowerBoundOptions) -> Result<LowerBoundReport, LowerBoundError> {
    p.validate()?;
    let start = Instant::now();
    let cfg = initial_conditions(p)?;
    let h1 = predict_height1(p)?;
    let prior = predict_chain(p, &[], opts.slack)?;
    // formation tick of each height under the predicted lifetimes
    let mut refused = None;
    let mut reach = 1u32;
    let mut t_pred = 0f64;
    for e in &prior {
        if e.j >= p.height() {
            break;
        }
        let next = if e.j == 1 { h1.theta1 as f64 } else { e.window.as_ref().map_or(f64::INFINITY, |w| w.lo) };
        t_pred += next;
        if t_pred > opts.budget as f64 {
            refused = Some(format!(
                "height {} needs about 10^{:.1} ticks, beyond the budget of {}",
                e.j + 1,
                e.window.as_ref().map_or(f64::INFINITY, |w| w.log10_center),
                opts.budget
            ));
            break;
        }
        reach = e.j + 1;
    }
    let stop_height = opts.stop_height.unwrap_or(reach).min(p.height()).max(1);
    let mut run_opts = RunOptions::new(u64::MAX, lazy_policy());
    run_opts.rule = HysteresisRule::disabled();
    run_opts.budget = Some(opts.budget);
    run_opts.record_states = false;
    let integrity = IntegrityObserver::default();
    run_opts.fast_forward = Some(FastForward { watch_radii: vec![integrity.lower_f64()], min_jump: 8, not_before: h1.theta1 });
    let mut sched = FlipScheduler::new(p, opts.flip_mode);
    let stop_size = 1usize << stop_height;
    let exact = opts.mode == Mode::Exact;
    let mut merges = MergeObserver::new(lazy_policy(), stop_size, exact.then(|| h1.clone()));
    let mut integrity = integrity;
    let gap_target = h1.merge_gap();
    let mut gap_check = GapCheck { tick: h1.theta1, pair: (1, 2), target: gap_target, result: None };
    let outcome = match opts.mode {
        Mode::Exact => drive(ExactState::from_configuration(&cfg), &run_opts, &mut sched, &mut integrity, &mut merges, &mut gap_check)?,
        Mode::Approx => drive(cfg.to_approx(opts.precision), &run_opts, &mut sched, &mut integrity, &mut merges, &mut gap_check)?,
    };
    if let Some(e) = &merges.failed {
        return Err(LowerBoundError::Run(e.clone()));
    }
    let (trace, stop, last_tick, stepped, skipped) = outcome;
    let genealogy = fusion_tree(&trace)?;

    let switches: Vec<u64> = trace.records.iter().filter(|r| r.switched).map(|r| r.tick).collect();
    let noise = trace
        .records
        .iter()
        .flat_map(|r| r.events.iter())
        .map(|ev| {
            let size = ev.members.len();
            let budget = NoiseBudget::for_flock_count(p.n, 4.0 * size as f64);
            let v = &validate_noise(std::slice::from_ref(ev), &budget, &switches).events[0];
            NoiseCheck {
                tick: ev.tick,
                size,
                constant: budget.constant,
                delta_norm: v.delta_norm,
                bound: v.bound,
                since_switch: v.since_switch,
                pass: v.pass(),
            }
        })
        .collect();

    let formed = |j: u32| -> Option<u64> {
        if j == 1 {
            return Some(0);
        }
        merges.merges.iter().find(|m| m.height == j && m.members[0] == 0).map(|m| m.tick)
    };
    let realized: Vec<Option<u64>> =
        (0..=p.height()).map(|j| if j == 0 { None } else { formed(j).zip(formed(j + 1)).map(|(a, b)| b - a) }).collect();
    let chain = predict_chain(p, &realized, opts.slack)?;
    let mut heights = Vec::new();
    for j in 1..=p.height() {
        let rec = merges.merges.iter().find(|m| m.height == j && m.members[0] == 0);
        let predicted = match j {
            1 => Some(crate::numerics::BigFraction::from_rational(&h1.m1)),
            2 => Some(crate::numerics::BigFraction::from_rational(&predict_m2(&p.q, realized[1].unwrap_or(h1.theta1)))),
            3 => realized[2].map(|t| predict_m3(&p.q, t)),
            _ => None,
        };
        let measured_exact = rec.and_then(|r| r.m.clone());
        let m_exact_match = match (&measured_exact, &predicted) {
            (Some(a), Some(b)) if exact => Some(a == b),
            _ => None,
        };
        let m_rel_error = match (&measured_exact, &predicted) {
            (Some(a), Some(b)) => Some(a.relative_error(b)),
            _ => match (rec, &predicted) {
                (Some(r), Some(b)) => Some(((r.m_f64 - b.to_f64()) / b.to_f64()).abs()),
                _ => None,
            },
        };
        let lag = if j == 1 { 0 } else { p.lag };
        let window = if j < p.height() {
            match (&measured_exact, rec) {
                (Some(m), _) => Some(predict_theta(j, m, lag, opts.slack)?),
                (None, Some(r)) if r.m_f64 != 0.0 => Some(predict_theta(
                    j,
                    &crate::numerics::BigFraction::from_rational(&Rational::from_f64(r.m_f64)?),
                    lag,
                    opts.slack,
                )?),
                _ => chain[(j - 1) as usize].window.clone(),
            }
        } else {
            None
        };
        let theta = realized[j as usize];
        heights.push(HeightReport {
            j,
            formed: formed(j).filter(|_| j == 1 || rec.is_some()),
            theta,
            m_measured: rec.map(|r| r.m_f64),
            m_measured_log10: rec.map(|r| r.m_log10),
            m_predicted_log10: predicted.as_ref().map(log10_abs).or(Some(chain[(j - 1) as usize].m_log10)),
            m_exact_match,
            m_rel_error,
            theta_in_window: theta.zip(window.as_ref()).map(|(t, w)| w.contains(t)),
            window,
            sign_expected: sign_pattern(j, opts.flip_mode).at_formation,
            sign_measured: rec.map(|r| r.sign),
            mirror: rec.and_then(|r| r.mirror),
        });
    }
    let theta_ratio = realized.get(2).copied().flatten().zip(realized[1]).map(|(b, a)| b as f64 / a as f64);
    Ok(LowerBoundReport {
        params: p.clone(),
        flip_mode: opts.flip_mode,
        mode: format!("{:?}", opts.mode).to_lowercase(),
        heights,
        merges: merges.merges,
        flips: sched.emitted().to_vec(),
        integrity: integrity.into_report(),
        approaches: merges.approaches,
        noise,
        trajectory_ok: merges.trajectory_ok,
        merge_gap_exact: gap_check.result,
        theta_ratio,
        chain,
        refused,
        stop: format!("{stop:?}").to_lowercase(),
        last_tick,
        stepped,
        skipped,
        seconds: start.elapsed().as_secs_f64(),
        genealogy,
        trace,
    })
}

/// Exact comparison of one distance at one tick.
struct GapCheck {
    tick: u64,
    pair: (usize, usize),
    target: Rational,
    result: Option<bool>,
}

impl<St: FlockState> Observer<St> for GapCheck {
    fn on_tick(
        &mut self,
        info: &crate::dynamics::TickInfo,
        state: &St,
        _p: &crate::dynamics::TransitionMatrix,
        _e: &[crate::dynamics::AppliedEvent],
    ) -> std::ops::ControlFlow<()> {
        if info.tick == self.tick && state.mode() == Mode::Exact {
            self.result = Some(state.compare_distance(self.pair.0, self.pair.1, &self.target) == std::cmp::Ordering::Equal);
        }
        std::ops::ControlFlow::Continue(())
    }
}

type Outcome = (Trace, StopReason, u64, u64, u64);

fn drive<St: FlockState>(
    initial: St,
    opts: &RunOptions,
    sched: &mut FlipScheduler,
    integrity: &mut IntegrityObserver,
    merges: &mut MergeObserver,
    gap: &mut GapCheck,
) -> Result<Outcome, LowerBoundError> {
    let out = run(initial, opts, sched, &mut [integrity, merges, gap])?;
    let last = out.state.tick();
    Ok((out.trace, out.stop, last, out.stepped, out.skipped))
}
