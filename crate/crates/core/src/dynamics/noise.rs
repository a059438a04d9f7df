use serde::Serialize;

use crate::numerics::Rational;

use super::events::AppliedEvent;
use super::run::Trace;

/// Limits on perturbations: how many, how large, and how soon after a switch.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseBudget {
    /// `None` means unlimited.
    pub max_events: Option<usize>,
    /// `C` in `δ(t) = C·log₂t / t`.
    pub constant: f64,
    /// Events must fire at most this many ticks after a switch (inclusive).
    pub window: u64,
}

impl NoiseBudget {
    pub fn new(max_events: Option<usize>, constant: f64, window: u64) -> Self {
        NoiseBudget { max_events, constant, window }
    }

    /// Default window `n³`.
    pub fn for_flock_count(n: usize, constant: f64) -> Self {
        let n = n as u64;
        NoiseBudget::new(None, constant, n * n * n)
    }

    /// Magnitude bound at tick `t`; ticks below 2 use `t = 2`.
    pub fn delta(&self, t: u64) -> f64 {
        let t = t.max(2) as f64;
        self.constant * t.log2() / t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventVerdict {
    pub tick: u64,
    pub members: Vec<usize>,
    pub delta_norm: f64,
    pub bound: f64,
    pub magnitude_ok: bool,
    pub alpha_ok: bool,
    /// Ticks since the most recent switch at or before the event.
    pub since_switch: Option<u64>,
    pub window_ok: bool,
}

impl EventVerdict {
    pub fn pass(&self) -> bool {
        self.magnitude_ok && self.alpha_ok && self.window_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseReport {
    pub events: Vec<EventVerdict>,
    pub count: usize,
    pub count_ok: bool,
}

impl NoiseReport {
    pub fn pass(&self) -> bool {
        self.count_ok && self.events.iter().all(EventVerdict::pass)
    }
}

fn alpha_in_range(alpha: &[String]) -> bool {
    alpha.iter().all(|a| a.parse::<Rational>().map(|r| r.abs() <= Rational::one()).unwrap_or(false))
}

/// Checks a log of applied events against `budget`; `switch_ticks` must be sorted.
pub fn validate_noise(events: &[AppliedEvent], budget: &NoiseBudget, switch_ticks: &[u64]) -> NoiseReport {
    let verdicts = events
        .iter()
        .map(|ev| {
            let bound = budget.delta(ev.tick);
            let idx = switch_ticks.partition_point(|&s| s <= ev.tick);
            let since_switch = idx.checked_sub(1).map(|k| ev.tick - switch_ticks[k]);
            EventVerdict {
                tick: ev.tick,
                members: ev.members.clone(),
                delta_norm: ev.delta_norm,
                bound,
                magnitude_ok: ev.delta_norm <= bound,
                alpha_ok: alpha_in_range(&ev.alpha),
                since_switch,
                window_ok: since_switch.is_some_and(|s| s <= budget.window),
            }
        })
        .collect();
    NoiseReport {
        events: verdicts,
        count: events.len(),
        count_ok: budget.max_events.is_none_or(|k| events.len() <= k),
    }
}

/// [`validate_noise`] over the events and switch flags recorded in a trace.
pub fn validate_trace_noise(trace: &Trace, budget: &NoiseBudget) -> NoiseReport {
    let events: Vec<AppliedEvent> = trace.records.iter().flat_map(|r| r.events.iter().cloned()).collect();
    let switches: Vec<u64> = trace.records.iter().filter(|r| r.switched).map(|r| r.tick).collect();
    validate_noise(&events, budget, &switches)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(tick: u64, alpha: &str, norm: f64) -> AppliedEvent {
        AppliedEvent { tick, members: vec![0, 1], alpha: vec![alpha.into()], delta_norm: norm }
    }

    #[test]
    fn empty_log_passes() {
        let r = validate_noise(&[], &NoiseBudget::new(Some(0), 1.0, 10), &[]);
        assert!(r.pass());
    }

    #[test]
    fn alpha_two_fails() {
        let b = NoiseBudget::new(None, 100.0, 10);
        let r = validate_noise(&[event(5, "2", 0.0)], &b, &[5]);
        assert!(!r.events[0].alpha_ok);
        assert!(!r.pass());
    }

    #[test]
    fn window_is_inclusive() {
        let b = NoiseBudget::new(None, 100.0, 3);
        let r = validate_noise(&[event(4, "-1", 0.1), event(7, "-1", 0.1), event(8, "-1", 0.1)], &b, &[4]);
        assert_eq!(r.events[0].since_switch, Some(0));
        assert!(r.events[0].window_ok && r.events[1].window_ok && !r.events[2].window_ok);
    }

    #[test]
    fn count_and_magnitude() {
        let b = NoiseBudget::new(Some(1), 1.0, 100);
        // δ(8) = 3/8
        assert_eq!(b.delta(8), 0.375);
        let r = validate_noise(&[event(8, "-1", 0.375), event(8, "-1", 0.376)], &b, &[1]);
        assert!(r.events[0].magnitude_ok && !r.events[1].magnitude_ok);
        assert!(!r.count_ok);
    }
}
