use num_complex::Complex64;
use thiserror::Error;

use crate::numlin::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NiError {
    #[error("frequency grid is empty")]
    GridEmpty,
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("imaginary-axis pole at {pole} has order {order}, only simple poles are allowed")]
    NonSimplePoleOnAxis { pole: Complex64, order: usize },
    #[error("pole at the origin has order {order}, at most 2 is allowed")]
    OriginPoleOrderTooHigh { order: usize },
    #[error("CB + B^T C^T is not positive definite (minimum eigenvalue {min_eigenvalue:e})")]
    PreconditionRViolated { min_eigenvalue: f64 },
    #[error("realization is not minimal: {0}")]
    NotMinimal(String),
    #[error("feedthrough D is not symmetric (|D - D^T| = {asymmetry:e})")]
    DNotSymmetric { asymmetry: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
