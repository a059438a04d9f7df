//! Sparse integer polynomials with unbounded exponents and the ⊕ combinator.

mod poly;
mod tree;

pub use poly::{oplus, SparsePoly, DEFAULT_EXPONENT_BITS};
pub use tree::{canonical_tree, degree_recurrence, CombineTree};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[non_exhaustive]
pub enum ResidueError {
    #[error("the zero polynomial has no low degree")]
    ZeroPolynomial,
    #[error("exponent 2^{height} needs more than {budget} bits")]
    Overflow { height: String, budget: usize },
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("level count must be at least 1")]
    Levels,
}
