//! Analysis of a single flock under a fixed transition matrix.

mod eigen;
mod ergodic;
mod fundamental;
mod stationary;

pub use eigen::{path_spectrum, spectrum, FlockSpectrum, PathSpectrum, SpectrumReport, RESIDUAL_TOLERANCE};
pub use ergodic::{backward_product, ergodicity, forward_product, tau1, tau2, tau2_sq, ErgodicityCoeffs};
pub use fundamental::{
    check_contraction, gamma, gamma_via_inverse, gamma_partial, limit_configuration, lyapunov_variance, mass_center,
    LimitConfiguration,
};
pub use stationary::{footprint_connected, infer_weights, stationary_distribution, stationary_from_weights, symmetric_exactly, symmetrize};

use crate::dynamics::DynamicsError;
use crate::numerics::NumericsError;

#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum SpectralError {
    #[error("flock is not connected")]
    Disconnected,
    #[error("confidence weights must be positive")]
    NonPositiveWeight,
    #[error("matrix is not of the form I - C L: {0}")]
    NotAveraging(String),
    #[error("eigen residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
