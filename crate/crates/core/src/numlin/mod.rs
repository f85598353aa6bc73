//! Dense complex linear algebra and matrix-equation solvers.
//!
//! Everything works on `DMatrix<Complex64>`; real matrices are carried as
//! complex matrices with zero imaginary parts and converted at the edges with
//! [`to_complex`] and [`real_part`]. The eigenvalue machinery is a plain
//! Householder-Hessenberg reduction followed by single-shift complex QR, which
//! keeps every Schur form genuinely upper triangular and makes eigenvalue
//! reordering a sequence of 2x2 unitary swaps.

mod care;
mod eig;
mod error;
mod hinf;
mod lyapunov;
mod predicates;
mod schur;
mod statespace;
mod svd;

pub use care::{
    are_residual, hamiltonian, solve_are, solve_are_extremal, solve_are_with, solve_care,
    AreSolution, Branch, ExtremalSolution,
};
pub use eig::{eig, eigenvalues, EigenDecomposition};
pub use error::LinalgError;
pub use hinf::{hinf_norm, hinf_norm_with, HinfNorm};
pub use lyapunov::{solve_lyapunov, solve_sylvester};
pub use predicates::{
    hermitian_eigenvalues, is_hermitian, is_hurwitz, is_pd, is_psd, is_skew_symmetric,
    min_hermitian_eigenvalue, spectral_abscissa, spectral_radius,
};
pub use schur::{ordered_schur, schur, spectral_projector, SchurForm};
pub use statespace::{transfer_eval, ComplexStateSpace};
pub use svd::{svd, Svd};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

/// Machine epsilon for `f64`.
pub const EPS: f64 = f64::EPSILON;

/// Absolute floor applied to every norm-relative tolerance.
pub const ABS_FLOOR: f64 = 1e-12;

/// Tolerances shared by the solvers. All values are relative to Frobenius
/// norms of the data they apply to, with [`ABS_FLOOR`] as the absolute floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Symmetry / definiteness checks.
    pub predicate: f64,
    /// Distance from the imaginary axis below which an eigenvalue counts as
    /// lying on it.
    pub axis: f64,
    /// Required relative residual for Riccati solutions.
    pub are_residual: f64,
    /// Relative accuracy of the H-infinity norm.
    pub hinf: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            predicate: 1e-9,
            axis: 1e-8,
            are_residual: 1e-8,
            hinf: 1e-6,
        }
    }
}

/// Scales a relative tolerance by `scale`, never going below the absolute floor.
pub fn scaled(tol: f64, scale: f64) -> f64 {
    (tol * scale).max(ABS_FLOOR)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

/// Largest imaginary component relative to the Frobenius norm.
pub fn imag_ratio(m: &CMat) -> f64 {
    let n = m.norm();
    if n == 0.0 {
        return 0.0;
    }
    imag_part(m).norm() / n
}

pub fn fro(m: &CMat) -> f64 {
    m.norm()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn check_square(m: &CMat) -> Result<usize, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: &CMat, what: &'static str) -> Result<(), LinalgError> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite(what))
    }
}

/// Solves `a * x = b` by LU with partial pivoting.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat, LinalgError> {
    check_square(a)?;
    if a.nrows() != b.nrows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "solve: lhs is {}x{}, rhs has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or(LinalgError::Singular("solve"))
}

pub fn inverse(a: &CMat) -> Result<CMat, LinalgError> {
    check_square(a)?;
    a.clone()
        .try_inverse()
        .ok_or(LinalgError::Singular("inverse"))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).s
}

pub fn sigma_max(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank with threshold `rel * sigma_max`.
pub fn rank(m: &CMat, rel: f64) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * top).count()
}

/// Orthonormal basis (columns) of the numerical null space of `m`, taking the
/// `dim` right singular vectors with smallest singular values.
pub fn null_space(m: &CMat, dim: usize) -> CMat {
    let n = m.ncols();
    if dim == 0 {
        return CMat::zeros(n, 0);
    }
    // Pad to at least square so that V is complete.
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let d = svd(&padded);
    d.v.columns(n - dim, dim).into_owned()
}

/// Orthonormal basis of the column space of `m` (top `dim` left singular vectors).
pub fn range_basis(m: &CMat, dim: usize) -> CMat {
    let rows = m.nrows();
    if dim == 0 {
        return CMat::zeros(rows, 0);
    }
    svd(m).u.columns(0, dim).into_owned()
}

/// Block-diagonal concatenation.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Assembles a 2x2 block matrix `[[a, b], [c, d]]`.
pub fn block2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (r1, c1) = (a.nrows(), a.ncols());
    let r2 = c.nrows();
    let c2 = b.ncols();
    let mut out = CMat::zeros(r1 + r2, c1 + c2);
    out.view_mut((0, 0), (r1, c1)).copy_from(a);
    out.view_mut((0, c1), (r1, c2)).copy_from(b);
    out.view_mut((r1, 0), (r2, c1)).copy_from(c);
    out.view_mut((r1, c1), (r2, c2)).copy_from(d);
    out
}

pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn vstack(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}
