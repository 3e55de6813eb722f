//! Sparse symmetric positive definite linear algebra.

mod cholesky;
mod ordering;
mod sparse;
mod woodbury;

pub use cholesky::{factorize_spd, factorize_with_order, solve_factored, CholeskyFactor, PIVOT_TOL};
pub use ordering::fill_reducing_order;
pub use sparse::{CsrMatrix, SparseSpd, TripletMatrix};
pub use woodbury::{woodbury_solve, WoodburyFactor};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("matrix is not positive definite (pivot {pivot:e} at original index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("Woodbury capacitance matrix is singular")]
    SingularCapacitance,
}
