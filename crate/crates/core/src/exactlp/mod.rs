//! Exact rational linear algebra and LP feasibility.

mod guide;
mod matrix;
pub mod rational;
mod simplex;

pub use matrix::{is_strictly_diagonally_dominant, solve_linear_system, RationalMatrix};
pub use rational::{parse_rational, Rational};
pub use simplex::{check_feasible, verify_farkas, verify_point, FeasibilityOutcome, LinearProgram};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Why an LP witness failed the exact checker.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("witness has length {found}, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("point violates constraint {row}")]
    ViolatedConstraint { row: usize },
    #[error("Farkas multiplier {row} is negative")]
    NegativeMultiplier { row: usize },
    #[error("Farkas combination has a nonzero entry in column {column}")]
    NonzeroCombination { column: usize },
    #[error("Farkas combination of right-hand sides is not positive")]
    NonpositiveBound,
}
