use serde::Serialize;

use crate::dynamics::Trace;

use super::{network_runs, AnalysisError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwitchEntry {
    pub tick: u64,
    pub gained: Vec<(usize, usize)>,
    pub lost: Vec<(usize, usize)>,
}

/// Ticks where the network differs from the previous tick's.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SwitchLog {
    pub entries: Vec<SwitchEntry>,
}

impl SwitchLog {
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn ticks(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.tick).collect()
    }

    /// Last tick at which some edge disappeared.
    pub fn last_edge_loss(&self) -> Option<u64> {
        self.entries.iter().rev().find(|e| !e.lost.is_empty()).map(|e| e.tick)
    }
}

pub fn detect_switches(trace: &Trace) -> Result<SwitchLog, AnalysisError> {
    let runs = network_runs(trace)?;
    let mut log = SwitchLog::default();
    for w in runs.windows(2) {
        let (t, g, _) = &w[1];
        let prev = &w[0].1;
        if g != prev {
            let (gained, lost) = g.diff(prev);
            log.entries.push(SwitchEntry { tick: *t, gained, lost });
        }
    }
    Ok(log)
}

/// Smallest `p` such that the second half of the trace repeats its networks with period `p`.
pub fn network_period(trace: &Trace) -> Option<u64> {
    let recs = &trace.records;
    if recs.len() < 4 || recs.iter().any(|r| r.jumped_from.is_some()) {
        return None;
    }
    let start = recs.len() / 2;
    (1..=(recs.len() - start) / 2).find(|&p| (start..recs.len()).all(|i| recs[i].edges == recs[i - p].edges)).map(|p| p as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SteadyState {
    pub reached: bool,
    pub last_switch: Option<u64>,
    /// Quiet window used for the verdict.
    pub window: u64,
}

/// No switch for `quiet` ticks before `last_tick`; default window `10·n·(last inter-switch gap)`.
pub fn steady_state(log: &SwitchLog, last_tick: u64, n: usize, quiet: Option<u64>) -> SteadyState {
    let ticks = log.ticks();
    let gap = match ticks.as_slice() {
        [] => 1,
        [t] => (*t).max(1),
        [.., a, b] => b - a,
    };
    let window = quiet.unwrap_or(10 * n as u64 * gap);
    let last_switch = ticks.last().copied();
    let since = last_tick - last_switch.unwrap_or(0);
    SteadyState { reached: since >= window, last_switch, window }
}
