//! Number fields, dense matrices and bit-size bookkeeping.

mod approx;
mod cd;
mod linalg;
mod matrix;
mod rational;
mod scalar;

pub use approx::{Approx, DEFAULT_PRECISION};
pub use cd::{cd_stats, lcm, BigFraction, CdStats};
pub use linalg::{inverse, solve};
pub use matrix::{mat_power, power_sum, Matrix, Vector};
pub use rational::{ratio_to_f64, Rational};
pub use scalar::{Mode, Scalar};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum NumericsError {
    #[error("malformed rational literal {0:?}")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not finite")]
    NotFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index ({i},{j}) outside a {rows}x{cols} matrix")]
    OutOfRange { i: usize, j: usize, rows: usize, cols: usize },
    #[error("operation requires exact entries")]
    Mode,
    #[error("matrix is singular")]
    Singular,
}
