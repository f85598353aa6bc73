use num_complex::Complex64;

use crate::numlin::{eigenvalues, inverse, svd, CMat, LinalgError, ABS_FLOOR};

const RANK_TOL: f64 = 1e-9;

/// Finite invariant zeros of `[[A - sI, B], [C, D]]` for `D` with full
/// column rank. They are the unobservable eigenvalues of
/// `(A - B E^-1 D^H C, (I - D E^-1 D^H) C)` with `E = D^H D`.
pub fn invariant_zeros(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.nrows();
    let p = d.nrows();
    let e_inv = inverse(&(d.adjoint() * d))?;
    let ax = a - b * &e_inv * d.adjoint() * c;
    let cx = (CMat::identity(p, p) - d * &e_inv * d.adjoint()) * c;
    let tol = RANK_TOL * ax.norm().max(cx.norm()).max(ABS_FLOOR);
    let mut v = CMat::identity(n, n);
    while v.ncols() > 0 {
        let k = v.ncols();
        let drift = &ax * &v - &v * (v.adjoint() * &ax * &v);
        let m = crate::numlin::vstack(&(&cx * &v), &drift);
        let dec = svd(&m);
        let rank = dec.s.iter().filter(|&&s| s > tol).count();
        if rank == 0 {
            break;
        }
        let w = dec.v.columns(rank, k - rank).into_owned();
        v = &v * w;
    }
    if v.ncols() == 0 {
        return Ok(vec![]);
    }
    eigenvalues(&(v.adjoint() * &ax * &v))
}
