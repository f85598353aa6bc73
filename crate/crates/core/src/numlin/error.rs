use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("QR iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("eigenvalue swap at position {position} is ill-conditioned (condition estimate {condition:.3e})")]
    SwapFailure { position: usize, condition: f64 },

    #[error("operator is singular: eigenvalue sum {gap:.3e} is within tolerance of zero")]
    SingularOperator { gap: f64 },

    #[error("matrix is singular in {0}")]
    Singular(&'static str),

    #[error("no stabilizing solution: {reason}")]
    NoStabilizingSolution { reason: String },

    /// The Hamiltonian has an imaginary-axis eigenvalue cluster of odd size
    /// at `i * frequency`, so no Lagrangian invariant subspace exists.
    #[error("Hamiltonian has an odd-multiplicity eigenvalue cluster on the imaginary axis at frequency {frequency:.6e}")]
    OddAxisMultiplicity { frequency: f64 },

    #[error("ill-conditioned invariant subspace: {reason}")]
    IllConditioned { reason: String },

    #[error("system is not Hurwitz (spectral abscissa {abscissa:.3e}); H-infinity norm is infinite")]
    UnstableSystem { abscissa: f64 },

    #[error("sI - A is singular at s = {s}")]
    PoleAtS { s: Complex64 },
}
