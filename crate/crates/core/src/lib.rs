//! Neighbor-averaging flocking dynamics on time-varying unit-disk networks.
//!
//! The crate is split into layers:
//! - [`numerics`]: exact rationals, extended-precision floats, dense matrices.
//! - [`dynamics`]: networks, transition matrices, the step map, perturbations, runs.
//! - [`spectral`]: stationary distributions, eigen-structure, ergodicity coefficients, Γ.
//! - [`analysis`]: switch logs, fusion trees, influence footprints, escape observables.
//! - [`lowerbound`]: the slow-merging path construction with flips and predictors.
//! - [`residue`]: sparse polynomials with huge exponents and the ⊕ combinator.
//! - [`cli`]: command drivers used by the `flocksim` binary.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod lowerbound;
pub mod numerics;
pub mod residue;
pub mod spectral;

pub use numerics::{Approx, Matrix, Mode, Rational, Scalar};
