use std::collections::BTreeMap;

use serde::Serialize;

use crate::dynamics::{EventSource, PerturbationEvent, TickInfo};
use crate::numerics::Rational;

use super::params::LBParams;
use super::predict::FlipMode;

/// A flip that was handed to the dynamics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlipRecord {
    pub tick: u64,
    pub members: Vec<usize>,
    pub height: u32,
    pub left: bool,
}

/// Emits flips `lag` ticks after the flocks chosen by the flipping rule form.
#[derive(Clone, Debug)]
pub struct FlipScheduler {
    n: usize,
    planar: bool,
    lag: u64,
    mode: FlipMode,
    pending: BTreeMap<u64, Vec<FlipRecord>>,
    emitted: Vec<FlipRecord>,
}

/// Whether a flock at `height`, on the given side of its parent, gets flipped.
pub fn flips(mode: FlipMode, height: u32, left: bool) -> bool {
    match mode {
        FlipMode::TrueRule => (height % 2 == 0 && height > 1 && left) || (height % 2 == 1 && height > 2 && !left),
        FlipMode::RightOnly => height >= 2 && !left,
    }
}

impl FlipScheduler {
    pub fn new(p: &LBParams, mode: FlipMode) -> Self {
        FlipScheduler { n: p.n, planar: p.planar, lag: p.lag, mode, pending: BTreeMap::new(), emitted: Vec::new() }
    }

    pub fn emitted(&self) -> &[FlipRecord] {
        &self.emitted
    }

    pub fn pending(&self) -> impl Iterator<Item = &FlipRecord> {
        self.pending.values().flatten()
    }

    fn alpha(&self) -> Vec<Rational> {
        // the unit vertical drift is shared by everyone and is left alone
        let mut a = vec![Rational::from_integer(-1)];
        if self.planar {
            a.push(Rational::one());
        }
        a
    }
}

impl EventSource for FlipScheduler {
    fn events_at(&mut self, info: &TickInfo) -> Vec<PerturbationEvent> {
        for &k in &info.formed {
            let f = &info.flocks[k];
            let size = f.len();
            if size < 2 || size >= self.n || !size.is_power_of_two() || f[0] % size != 0 {
                continue;
            }
            if f.iter().enumerate().any(|(a, &b)| b != f[0] + a) {
                continue;
            }
            let height = size.trailing_zeros();
            let left = (f[0] / size) % 2 == 0;
            if flips(self.mode, height, left) {
                let tick = info.tick + self.lag;
                self.pending.entry(tick).or_default().push(FlipRecord { tick, members: f.clone(), height, left });
            }
        }
        let due = self.pending.remove(&info.tick).unwrap_or_default();
        let alpha = self.alpha();
        let events = due.iter().map(|r| PerturbationEvent::new(r.tick, r.members.clone(), alpha.clone())).collect();
        self.emitted.extend(due);
        events
    }

    fn next_event_after(&self, after: u64) -> Option<u64> {
        self.pending.range(after + 1..).next().map(|(&t, _)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_table() {
        use FlipMode::*;
        assert!(!flips(TrueRule, 1, true) && !flips(TrueRule, 1, false));
        assert!(flips(TrueRule, 2, true) && !flips(TrueRule, 2, false));
        assert!(!flips(TrueRule, 3, true) && flips(TrueRule, 3, false));
        assert!(flips(TrueRule, 4, true) && !flips(TrueRule, 4, false));
        assert!(flips(RightOnly, 2, false) && !flips(RightOnly, 2, true));
    }
}
