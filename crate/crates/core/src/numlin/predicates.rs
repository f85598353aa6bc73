use super::{check_square, eigenvalues, hermitian_part, CMat, LinalgError, ABS_FLOOR};

fn scale(m: &CMat) -> f64 {
    m.norm().max(ABS_FLOOR)
}

/// `|M - M^H|_F <= tol * |M|_F`.
pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= tol * scale(m)
}

/// `|M + M^T|_F <= tol * |M|_F` (plain transpose, no conjugation).
pub fn is_skew_symmetric(m: &CMat, tol: f64) -> bool {
    m.is_square() && (m + m.transpose()).norm() <= tol * scale(m)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>, LinalgError> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let h = hermitian_part(m);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

pub fn min_hermitian_eigenvalue(m: &CMat) -> Result<f64, LinalgError> {
    Ok(hermitian_eigenvalues(m)?.first().copied().unwrap_or(0.0))
}

/// Hermitian and positive semidefinite up to `tol * |M|_F`.
pub fn is_psd(m: &CMat, tol: f64) -> Result<bool, LinalgError> {
    check_square(m)?;
    if !is_hermitian(m, tol) {
        return Ok(false);
    }
    Ok(min_hermitian_eigenvalue(m)? >= -tol * scale(m))
}

/// Hermitian with every eigenvalue above `tol * |M|_F`.
pub fn is_pd(m: &CMat, tol: f64) -> Result<bool, LinalgError> {
    let n = check_square(m)?;
    if n == 0 || !is_hermitian(m, tol) {
        return Ok(n == 0);
    }
    Ok(min_hermitian_eigenvalue(m)? > tol * scale(m))
}

/// Largest real part over the spectrum (`-inf` for an empty matrix).
pub fn spectral_abscissa(a: &CMat) -> Result<f64, LinalgError> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Every eigenvalue has real part below `-tol * |A|_F`.
pub fn is_hurwitz(a: &CMat, tol: f64) -> Result<bool, LinalgError> {
    Ok(spectral_abscissa(a)? < -tol * scale(a))
}

pub fn spectral_radius(m: &CMat) -> Result<f64, LinalgError> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}
