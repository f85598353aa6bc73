//! Linear quantum systems: doubled-up QSDE coefficients, the real quadrature
//! form, physically realizable construction from `(R, Lambda)` and the
//! skew-symmetric Riccati realizability test.

mod physreal;
mod qsde;
mod quadrature;
mod skew_are;

pub use physreal::{
    extract_physreal, gamma_matrix, interleave_permutation, physreal_construct, realizability_residual,
    theta, PhysRealSpec, RealizabilityResidual,
};
pub use qsde::{build_qsde, doubled, is_doubled_up, j_signature, DoubledSystem, QuantumSpec};
pub use quadrature::{quadrature_basis, quadrature_inverse, quadrature_transform, QuadratureSystem};
pub use skew_are::{
    physreal_are_test, physreal_are_test_with, skew_are_residual, PhysRealResult, SkewAreOptions, StartKind,
};

use thiserror::Error;

use crate::numlin::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QlinError {
    #[error("specification invariant violated: {0}")]
    SpecInvariantViolated(String),
    #[error("matrix is not in doubled-up form: {0}")]
    StructureViolated(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no non-singular skew-symmetric solution found from {starts} starts (best relative residual {best_residual:e}); this does not prove the system is not realizable")]
    NoSkewSolutionFound { starts: usize, best_residual: f64 },
    #[error("skew-symmetric solution is singular (reciprocal condition {rcond:e})")]
    SingularX { rcond: f64 },
    #[error("realization does not reproduce the transfer function (relative error {error:e})")]
    TransferMismatch { error: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
