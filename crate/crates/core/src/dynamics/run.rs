use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::events::{AppliedEvent, EventSource, PerturbationEvent, TickInfo};
use super::fastforward::{safe_jump_length, BlockCache, FastForward};
use super::network::{build_network, FlockNetwork, HysteresisRule};
use super::policy::ConfidencePolicy;
use super::state::FlockState;
use super::transition::{transition, TransitionMatrix};
use super::DynamicsError;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub horizon: u64,
    pub policy: ConfidencePolicy,
    pub rule: HysteresisRule,
    /// Maximum number of ticks advanced (stepped or skipped).
    pub budget: Option<u64>,
    pub fast_forward: Option<FastForward>,
    /// Store positions and velocities in each record.
    pub record_states: bool,
    /// Produce per-tick records; observers see every tick either way.
    pub keep_records: bool,
}

impl RunOptions {
    pub fn new(horizon: u64, policy: ConfidencePolicy) -> Self {
        RunOptions {
            horizon,
            policy,
            rule: HysteresisRule::default(),
            budget: None,
            fast_forward: None,
            record_states: true,
            keep_records: true,
        }
    }
}

/// One line of a trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub edges: Vec<(usize, usize)>,
    pub flocks: Vec<Vec<usize>>,
    pub switched: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<AppliedEvent>,
    /// Set when the ticks after `jumped_from` up to this one were skipped with the network fixed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumped_from: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocities: Option<Vec<Vec<String>>>,
}

impl TickRecord {
    pub fn network(&self, n: usize) -> Result<FlockNetwork, DynamicsError> {
        FlockNetwork::from_edges(n, &self.edges)
    }
}

/// An edge kept by hysteresis although its length exceeds `1 + √ε_h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundnessViolation {
    pub tick: u64,
    pub edge: (usize, usize),
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub n: usize,
    pub d: usize,
    pub records: Vec<TickRecord>,
    #[serde(default)]
    pub soundness_violations: Vec<SoundnessViolation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Horizon,
    Observer,
    Budget,
}

pub struct RunOutcome<St> {
    pub trace: Trace,
    pub state: St,
    pub stop: StopReason,
    pub stepped: u64,
    pub skipped: u64,
}

/// Synchronous per-tick callback.
pub trait Observer<St> {
    /// Called once per visited tick with the state before that tick's perturbations.
    fn on_tick(&mut self, info: &TickInfo, state: &St, p: &TransitionMatrix, events: &[AppliedEvent]) -> ControlFlow<()>;

    fn on_jump(&mut self, _from: u64, _to: u64) {}
}

fn snapshot<St: FlockState>(state: &St) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let pos = (0..state.n()).map(|i| (0..state.d()).map(|k| state.position_text(i, k)).collect()).collect();
    let vel = (0..state.n()).map(|i| (0..state.d()).map(|k| state.velocity_text(i, k)).collect()).collect();
    (pos, vel)
}

/// Drives the dynamics from `initial` until the horizon, the budget, or an observer stops it.
///
/// A state at tick 0 holds `x(0)` and the first displacement `v(1)`, which moves the birds
/// without averaging. From tick 1 on, a state holds `x(t)` and `v(t)`.
pub fn run<St: FlockState>(
    initial: St,
    opts: &RunOptions,
    source: &mut dyn EventSource,
    observers: &mut [&mut dyn Observer<St>],
) -> Result<RunOutcome<St>, DynamicsError> {
    let mut records = Vec::new();
    let mut out = run_streaming(initial, opts, source, observers, &mut |r| {
        records.push(r);
        Ok(())
    })?;
    out.trace.records = records;
    Ok(out)
}

/// Like [`run`], but hands each record to `sink` as soon as it is complete instead of keeping it.
pub fn run_streaming<St: FlockState>(
    initial: St,
    opts: &RunOptions,
    source: &mut dyn EventSource,
    observers: &mut [&mut dyn Observer<St>],
    sink: &mut dyn FnMut(TickRecord) -> Result<(), DynamicsError>,
) -> Result<RunOutcome<St>, DynamicsError> {
    let n = initial.n();
    let d = initial.d();
    let mut state = initial;
    let mut trace = Trace { n, d, records: Vec::new(), soundness_violations: Vec::new() };
    let mut prev_net: Option<FlockNetwork> = None;
    let mut prev_flocks: Vec<Vec<usize>> = Vec::new();
    let mut prev_state: Option<St> = None;
    let mut prev_p: Option<TransitionMatrix> = None;
    let mut carried: Option<(FlockNetwork, u64)> = None;
    let mut power_cache = St::JumpCache::default();
    let mut block_cache = BlockCache::default();
    let mut stepped = 0u64;
    let mut skipped = 0u64;
    let sqrt_eps = opts.rule.epsilon.to_f64().sqrt();
    let stop;
    loop {
        let t = state.tick();
        let (net, jumped_from, jump_ok) = match carried.take() {
            Some((g, from)) => (g, Some(from), true),
            None => {
                let prev = match (&prev_net, &prev_state) {
                    (Some(g), Some(s)) => Some((g, s)),
                    _ => None,
                };
                let built = build_network(&state, prev, &opts.rule)?;
                for &(i, j) in &built.retained {
                    let dist = state.distance_f64(i, j);
                    if dist > 1.0 + sqrt_eps {
                        trace.soundness_violations.push(SoundnessViolation { tick: t, edge: (i, j), distance: dist });
                    }
                }
                // edges held by hysteresis depend on history, so no jump may start here
                let ok = built.retained.is_empty();
                (built.network, None, ok)
            }
        };
        let switched = prev_net.as_ref().is_some_and(|g| *g != net);
        let flocks = net.flocks();
        let formed: Vec<usize> = if prev_net.is_none() {
            (0..flocks.len()).collect()
        } else {
            (0..flocks.len()).filter(|&k| !prev_flocks.contains(&flocks[k])).collect()
        };
        let p = match prev_p.take() {
            Some(p) if !switched && prev_net.is_some() => p,
            _ => transition(&net, &opts.policy)?,
        };
        let info = TickInfo { tick: t, network: net.clone(), flocks: flocks.clone(), switched, formed };
        let events: Vec<PerturbationEvent> = source.events_at(&info);
        for ev in &events {
            ev.validate(&net, d)?;
        }
        let mut applied: Vec<AppliedEvent> = events
            .iter()
            .map(|ev| AppliedEvent {
                tick: t,
                members: ev.members.clone(),
                alpha: ev.alpha.iter().map(|a| a.to_string()).collect(),
                delta_norm: 0.0,
            })
            .collect();
        let mut halt = false;
        for ob in observers.iter_mut() {
            if ob.on_tick(&info, &state, &p, &applied).is_break() {
                halt = true;
            }
        }
        let states = if opts.record_states { Some(snapshot(&state)) } else { None };
        for (ev, rec) in events.iter().zip(applied.iter_mut()) {
            rec.delta_norm = state.perturb(&ev.members, &ev.alpha);
        }
        if opts.keep_records {
            let (positions, velocities) = match states {
                Some((a, b)) => (Some(a), Some(b)),
                None => (None, None),
            };
            sink(TickRecord {
                tick: t,
                edges: net.edges(),
                flocks: flocks.clone(),
                switched,
                events: applied,
                jumped_from,
                positions,
                velocities,
            })?;
        }
        if halt {
            stop = StopReason::Observer;
            break;
        }
        if t >= opts.horizon {
            stop = StopReason::Horizon;
            break;
        }
        let advanced = stepped + skipped;
        let remaining_budget = opts.budget.map(|b| b.saturating_sub(advanced));
        if remaining_budget == Some(0) {
            stop = StopReason::Budget;
            break;
        }
        let mut jump = 0u64;
        if let Some(ff) = opts.fast_forward.as_ref().filter(|ff| jump_ok && t > 0 && t >= ff.not_before) {
            let mut s = safe_jump_length(&state, &flocks, &ff.watch_radii);
            s = s.min(opts.horizon - t);
            if let Some(r) = remaining_budget {
                s = s.min(r);
            }
            if let Some(next) = source.next_event_after(t) {
                s = s.min(next - t);
            }
            if s >= ff.min_jump.max(2) {
                jump = s;
            }
        }
        if jump > 0 {
            let blocks = block_cache.blocks(&p, &flocks)?;
            state.jump(&blocks, jump, &mut power_cache)?;
            for ob in observers.iter_mut() {
                ob.on_jump(t, t + jump);
            }
            skipped += jump;
            carried = Some((net.clone(), t));
            prev_state = None;
        } else {
            if opts.rule.enabled {
                prev_state = Some(state.clone());
            }
            if t == 0 {
                // tick 0 carries v(1), which moves x(0) unaveraged
                state.step(&transition(&FlockNetwork::empty(n), &opts.policy)?);
            } else {
                state.step(&p);
            }
            stepped += 1;
        }
        prev_p = Some(p);
        prev_net = Some(net);
        prev_flocks = flocks;
    }
    Ok(RunOutcome { trace, state, stop, stepped, skipped })
}

/// Plain run without events or observers.
pub fn simulate<St: FlockState>(initial: St, opts: &RunOptions) -> Result<RunOutcome<St>, DynamicsError> {
    let mut none = super::events::ScheduledEvents::none();
    run(initial, opts, &mut none, &mut [])
}
