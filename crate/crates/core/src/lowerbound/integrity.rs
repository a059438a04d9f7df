use std::cmp::Ordering;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::dynamics::{AppliedEvent, FlockState, Observer, TickInfo, TransitionMatrix};
use crate::numerics::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrityViolation {
    pub tick: u64,
    pub what: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrityReport {
    pub ticks_checked: u64,
    pub violations: u64,
    pub first: Option<IntegrityViolation>,
    /// Shortest and longest intra-flock edge seen at a checked tick.
    pub min_edge: f64,
    pub max_edge: f64,
}

impl IntegrityReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Checks at every visited tick that each flock is a path of consecutive birds
/// with edge lengths in `[lower, 1]`, and that birds keep their left-to-right order.
///
/// Skipped ticks are covered when the run's fast-forward watches `lower` as a radius.
pub struct IntegrityObserver {
    lower: Rational,
    lower_f64: f64,
    report: IntegrityReport,
}

impl Default for IntegrityObserver {
    fn default() -> Self {
        Self::new(Rational::frac(29, 50))
    }
}

impl IntegrityObserver {
    pub fn new(lower: Rational) -> Self {
        let lower_f64 = lower.to_f64();
        IntegrityObserver {
            lower,
            lower_f64,
            report: IntegrityReport { ticks_checked: 0, violations: 0, first: None, min_edge: f64::INFINITY, max_edge: 0.0 },
        }
    }

    pub fn lower_f64(&self) -> f64 {
        self.lower_f64
    }

    pub fn report(&self) -> &IntegrityReport {
        &self.report
    }

    pub fn into_report(self) -> IntegrityReport {
        self.report
    }

    fn flag(&mut self, tick: u64, what: String) {
        self.report.violations += 1;
        if self.report.first.is_none() {
            self.report.first = Some(IntegrityViolation { tick, what });
        }
    }
}

impl<St: FlockState> Observer<St> for IntegrityObserver {
    fn on_tick(&mut self, info: &TickInfo, state: &St, _p: &TransitionMatrix, _events: &[AppliedEvent]) -> ControlFlow<()> {
        let t = info.tick;
        self.report.ticks_checked += 1;
        let one = Rational::one();
        for f in &info.flocks {
            let consecutive = f.windows(2).all(|w| w[1] == w[0] + 1);
            let path_edges = f.windows(2).all(|w| info.network.has_edge(w[0], w[1]));
            let edge_count: usize = f.iter().map(|&i| f.iter().filter(|&&j| j > i && info.network.has_edge(i, j)).count()).sum();
            if !consecutive || !path_edges || edge_count + 1 != f.len() {
                self.flag(t, format!("flock {f:?} is not a path of consecutive birds"));
                continue;
            }
            for w in f.windows(2) {
                let (i, j) = (w[0], w[1]);
                let len = state.distance_f64(i, j);
                self.report.min_edge = self.report.min_edge.min(len);
                self.report.max_edge = self.report.max_edge.max(len);
                if state.compare_distance(i, j, &self.lower) == Ordering::Less {
                    self.flag(t, format!("edge ({i},{j}) shorter than {}", self.lower));
                }
                if state.compare_distance(i, j, &one) == Ordering::Greater {
                    self.flag(t, format!("edge ({i},{j}) longer than 1"));
                }
            }
        }
        for i in 1..state.n() {
            if state.position_order(i - 1, i, 0) != Ordering::Less {
                self.flag(t, format!("birds {} and {i} out of order", i - 1));
            }
        }
        ControlFlow::Continue(())
    }
}
