//! Slow-merging path construction: generator, flip scheduler, predictors, and checks.

mod driver;
mod integrity;
mod params;
mod predict;
mod schedule;
mod tracker;

pub use driver::{run_lowerbound, HeightReport, LowerBoundOptions, LowerBoundReport, NoiseCheck};
pub use integrity::{IntegrityObserver, IntegrityReport, IntegrityViolation};
pub use params::{initial_conditions, lazy_policy, LBParams};
pub use predict::{
    log10_abs, path_second_eigenvalue, predict_chain, predict_height1, predict_m2, predict_m3, predict_theta, sign_pattern,
    ChainEntry, FlipMode, Height1Prediction, SignPattern, ThetaWindow,
};
pub use schedule::{flips, FlipRecord, FlipScheduler};
pub use tracker::{ApproachCheck, MergeObserver, MergeRecord};

use crate::analysis::AnalysisError;
use crate::dynamics::DynamicsError;
use crate::numerics::{NumericsError, Rational};

#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum LowerBoundError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("1/q = {0} is not congruent to 2 mod 6")]
    Congruence(String),
    #[error("stationary velocity vanishes at height {0}")]
    Degenerate(u32),
    #[error("run failed: {0}")]
    Run(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}
