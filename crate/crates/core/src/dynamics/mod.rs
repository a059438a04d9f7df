//! The flocking state machine: networks, confidence policies, transition matrices,
//! the step map, perturbations and run driving.

mod events;
mod exact;
mod fastforward;
pub mod io;
mod network;
mod noise;
mod policy;
mod run;
mod state;
mod transition;

pub use events::{AppliedEvent, EventSource, PerturbationEvent, ScheduledEvents, TickInfo};
pub use exact::{ExactState, PowerCache};
pub use fastforward::{fundamental_of, safe_jump_length, stationary_of, BlockCache, FastForward};
pub use network::{build_network, laplacian, sqrt_gap_below, FlockNetwork, HysteresisRule, NetworkBuild};
pub use noise::{validate_noise, validate_trace_noise, EventVerdict, NoiseBudget, NoiseReport};
pub use policy::ConfidencePolicy;
pub use run::{run, run_streaming, simulate, Observer, RunOptions, RunOutcome, SoundnessViolation, StopReason, TickRecord, Trace};
pub use state::{apply_perturbation, step, Configuration, FlockState, JumpBlock};
pub use transition::{integer_form, transition, TransitionMatrix};

use crate::numerics::NumericsError;

#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum DynamicsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("confidence policy: {0}")]
    Policy(String),
    #[error("invalid perturbation: {0}")]
    InvalidEvent(String),
    #[error("{}", match line { Some(l) => format!("config line {l}: {message}"), None => format!("config: {message}") })]
    Config { line: Option<usize>, message: String },
    #[error("trace: {0}")]
    Trace(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
