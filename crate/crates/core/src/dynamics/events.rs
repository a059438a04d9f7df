use serde::{Deserialize, Serialize};

use crate::numerics::Rational;

use super::network::FlockNetwork;
use super::DynamicsError;

/// Coordinatewise velocity rescaling of whole flocks at one tick.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationEvent {
    pub tick: u64,
    pub members: Vec<usize>,
    pub alpha: Vec<Rational>,
}

impl PerturbationEvent {
    pub fn new(tick: u64, mut members: Vec<usize>, alpha: Vec<Rational>) -> Self {
        members.sort_unstable();
        members.dedup();
        PerturbationEvent { tick, members, alpha }
    }

    /// Velocity reversal of `members`.
    pub fn flip(tick: u64, members: Vec<usize>, d: usize) -> Self {
        Self::new(tick, members, vec![Rational::from_integer(-1); d])
    }

    pub fn alpha_admissible(&self) -> bool {
        self.alpha.iter().all(|a| a.abs() <= Rational::one())
    }

    /// Checks dimensions, `|α| ≤ 1`, and that the members are a union of whole flocks of `g`.
    pub fn validate(&self, g: &FlockNetwork, d: usize) -> Result<(), DynamicsError> {
        if self.alpha.len() != d {
            return Err(DynamicsError::InvalidEvent(format!(
                "alpha has {} entries for dimension {d}",
                self.alpha.len()
            )));
        }
        if !self.alpha_admissible() {
            return Err(DynamicsError::InvalidEvent("alpha entry outside [-1, 1]".into()));
        }
        if self.members.is_empty() || self.members.iter().any(|&i| i >= g.n()) {
            return Err(DynamicsError::InvalidEvent("member set empty or out of range".into()));
        }
        let mut inside = vec![false; g.n()];
        for &i in &self.members {
            inside[i] = true;
        }
        for f in g.flocks() {
            let k = f.iter().filter(|&&i| inside[i]).count();
            if k != 0 && k != f.len() {
                return Err(DynamicsError::InvalidEvent(format!(
                    "members split the flock {f:?} at tick {}",
                    self.tick
                )));
            }
        }
        Ok(())
    }
}

/// A perturbation as it was applied during a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppliedEvent {
    pub tick: u64,
    pub members: Vec<usize>,
    pub alpha: Vec<String>,
    /// ℓ₂ norm of the change in the stacked velocity vector.
    pub delta_norm: f64,
}

/// Supplies perturbations tick by tick; may react to the network it sees.
pub trait EventSource {
    fn events_at(&mut self, info: &TickInfo) -> Vec<PerturbationEvent>;

    /// Earliest tick `> after` at which an event is already known to fire.
    fn next_event_after(&self, after: u64) -> Option<u64>;
}

/// Network-level facts about one tick, shared with event sources and observers.
#[derive(Clone, Debug)]
pub struct TickInfo {
    pub tick: u64,
    pub network: FlockNetwork,
    pub flocks: Vec<Vec<usize>>,
    pub switched: bool,
    /// Indices into `flocks` of flocks absent from the previous tick.
    pub formed: Vec<usize>,
}

/// Fixed, time-sorted event list.
#[derive(Clone, Debug, Default)]
pub struct ScheduledEvents {
    events: Vec<PerturbationEvent>,
    cursor: usize,
}

impl ScheduledEvents {
    pub fn new(mut events: Vec<PerturbationEvent>) -> Self {
        events.sort_by_key(|e| e.tick);
        ScheduledEvents { events, cursor: 0 }
    }

    pub fn none() -> Self {
        Self::default()
    }
}

impl EventSource for ScheduledEvents {
    fn events_at(&mut self, info: &TickInfo) -> Vec<PerturbationEvent> {
        while self.cursor < self.events.len() && self.events[self.cursor].tick < info.tick {
            self.cursor += 1;
        }
        let mut out = Vec::new();
        while self.cursor < self.events.len() && self.events[self.cursor].tick == info.tick {
            out.push(self.events[self.cursor].clone());
            self.cursor += 1;
        }
        out
    }

    fn next_event_after(&self, after: u64) -> Option<u64> {
        self.events.iter().map(|e| e.tick).find(|&t| t > after)
    }
}
