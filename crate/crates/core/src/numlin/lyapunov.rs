//! Bartels-Stewart style solvers on complex Schur forms.

use num_complex::Complex64;

use super::schur::schur_raw;
use super::{check_finite, check_square, is_hermitian, CMat, LinalgError, ABS_FLOOR, EPS};

/// Solves `A X + X B = C`.
pub fn solve_sylvester(a: &CMat, b: &CMat, c: &CMat) -> Result<CMat, LinalgError> {
    let m = check_square(a)?;
    let n = check_square(b)?;
    if c.nrows() != m || c.ncols() != n {
        return Err(LinalgError::DimensionMismatch(format!(
            "sylvester: A is {m}x{m}, B is {n}x{n}, C is {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    check_finite(a, "sylvester A")?;
    check_finite(b, "sylvester B")?;
    check_finite(c, "sylvester C")?;
    if m == 0 || n == 0 {
        return Ok(CMat::zeros(m, n));
    }

    let (ua, ta) = schur_raw(a)?;
    let (ub, tb) = schur_raw(b)?;
    let f = ua.adjoint() * c * &ub;
    let scale = (a.norm() + b.norm()).max(ABS_FLOOR);
    let tiny = 100.0 * EPS * scale;

    // Column j of Y solves (T_a + s_jj I) y_j = f_j - sum_{k<j} s_kj y_k.
    let mut y = CMat::zeros(m, n);
    for j in 0..n {
        let mut rhs: Vec<Complex64> = (0..m).map(|i| f[(i, j)]).collect();
        for k in 0..j {
            let s = tb[(k, j)];
            if s != Complex64::new(0.0, 0.0) {
                for i in 0..m {
                    rhs[i] -= y[(i, k)] * s;
                }
            }
        }
        let shift = tb[(j, j)];
        for i in (0..m).rev() {
            let mut acc = rhs[i];
            for l in (i + 1)..m {
                acc -= ta[(i, l)] * y[(l, j)];
            }
            let denom = ta[(i, i)] + shift;
            if denom.norm() <= tiny {
                return Err(LinalgError::SingularOperator { gap: denom.norm() });
            }
            y[(i, j)] = acc / denom;
        }
    }
    Ok(&ua * y * ub.adjoint())
}

/// Solves the continuous Lyapunov equation `A P + P A^H + Q = 0`.
///
/// The result is made exactly Hermitian when `Q` is Hermitian.
pub fn solve_lyapunov(a: &CMat, q: &CMat) -> Result<CMat, LinalgError> {
    let p = solve_sylvester(a, &a.adjoint(), &(-q))?;
    if is_hermitian(q, 1e-12) {
        Ok((&p + p.adjoint()).scale(0.5))
    } else {
        Ok(p)
    }
}
