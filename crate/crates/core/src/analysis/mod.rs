//! Diagnostics computed from recorded traces.

mod genealogy;
mod influence;
mod observables;
mod switches;

pub use genealogy::{fusion_tree, FlockNode, Genealogy, SplitEvent};
pub use influence::{influence, product_profile, recurrent_influence, stabilizers, InfluenceState, ProductStep, Stabilizer};
pub use observables::{escape_observables, parse_entry, stationary_velocities, EscapeObservables, FlockVelocity};
pub use switches::{detect_switches, network_period, steady_state, SteadyState, SwitchEntry, SwitchLog};

use crate::dynamics::{DynamicsError, FlockNetwork, Trace};
use crate::spectral::SpectralError;

#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum AnalysisError {
    #[error("tick {0} is not in the trace")]
    TickNotFound(u64),
    #[error("tick {0} has no recorded positions or velocities")]
    MissingStates(u64),
    #[error("bird {0} out of range")]
    BirdOutOfRange(usize),
    #[error("angle undefined for a zero vector")]
    UndefinedAngle,
    #[error("bad entry {0:?}")]
    BadEntry(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Every tick covered by a trace with its network, expanding fast-forwarded gaps.
///
/// Yields `(tick, network, repeat)`: the network held for `repeat` consecutive ticks ending at `tick`.
pub(crate) fn network_runs(trace: &Trace) -> Result<Vec<(u64, FlockNetwork, u64)>, AnalysisError> {
    trace
        .records
        .iter()
        .map(|r| {
            let g = r.network(trace.n)?;
            let repeat = r.jumped_from.map_or(1, |f| r.tick - f);
            Ok((r.tick, g, repeat))
        })
        .collect()
}
