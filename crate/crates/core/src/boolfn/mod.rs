//! Boolean functions on finite point sets, halfspaces, and polynomials.
//!
//! Throughout, `−1` encodes true and `+1` encodes false.

mod function;
mod halfspace;
mod ops;
mod pointset;
mod polynomial;

pub use function::BooleanFunction;
pub use halfspace::{halfspace_to_function, Halfspace};
pub use ops::{
    binary_entropy_bound_check, binomial, block_summary, block_symmetrize, conjunction, majority,
    monomial_basis, parity, parity_char, symmetrize_polynomial, Block,
};
pub use pointset::{PointSet, MAX_CUBE_DIM};
pub use polynomial::{monomial_value, Exponent, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoolFnError {
    #[error("linear form vanishes at {point:?}")]
    VanishingForm { point: Vec<i64> },
    #[error("function differs on {first:?} and {second:?}, which share block weights")]
    NotBlockSymmetric { first: Vec<i64>, second: Vec<i64> },
    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<i64>),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0}")]
    Malformed(String),
}
