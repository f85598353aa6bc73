//! Continuous-time algebraic Riccati equations
//! `A^H X + X A - X G X + Q = 0` solved through invariant subspaces of the
//! Hamiltonian matrix `[[A, -G], [-Q, -A^H]]`.

use num_complex::Complex64;

use super::schur::{reorder, schur_raw};
use super::{
    check_finite, check_square, hermitian_part, inverse, is_hermitian, null_space,
    singular_values, solve_lyapunov, spectral_abscissa, CMat, LinalgError, Tolerances, ABS_FLOOR,
};

#[derive(Debug, Clone)]
pub struct AreSolution {
    pub x: CMat,
    /// Frobenius norm of the equation residual.
    pub residual: f64,
    /// Residual divided by `max(1, |Q|_F)`.
    pub relative_residual: f64,
    /// Largest real part of `A - G X`.
    pub closed_loop_abscissa: f64,
    pub refinement_steps: usize,
}

/// Which half of the spectrum the invariant subspace is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Eigenvalues with negative real part; with `G >= 0` this is the maximal solution.
    Stabilizing,
    /// Eigenvalues with positive real part; with `G >= 0` this is the minimal solution.
    AntiStabilizing,
}

/// Solution built from a (possibly) non-strict invariant subspace.
#[derive(Debug, Clone)]
pub struct ExtremalSolution {
    pub x: CMat,
    pub branch: Branch,
    pub residual: f64,
    pub relative_residual: f64,
    /// Number of Hamiltonian eigenvalues treated as lying on the imaginary axis.
    pub axis_eigenvalues: usize,
}

pub fn hamiltonian(a: &CMat, g: &CMat, q: &CMat) -> CMat {
    super::block2(a, &(-g), &(-q), &(-a.adjoint()))
}

pub fn are_residual(a: &CMat, g: &CMat, q: &CMat, x: &CMat) -> CMat {
    a.adjoint() * x + x * a - x * g * x + q
}

fn validate(a: &CMat, g: &CMat, q: &CMat) -> Result<usize, LinalgError> {
    let n = check_square(a)?;
    for (m, name) in [(g, "G"), (q, "Q")] {
        if m.nrows() != n || m.ncols() != n {
            return Err(LinalgError::DimensionMismatch(format!(
                "riccati: {name} is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    check_finite(a, "riccati A")?;
    check_finite(g, "riccati G")?;
    check_finite(q, "riccati Q")?;
    Ok(n)
}

/// Graph subspace `X = V2 V1^-1` of an n-dimensional basis `V` (2n x n).
fn graph_solution(v: &CMat, n: usize) -> Result<CMat, LinalgError> {
    let v1 = v.rows(0, n).into_owned();
    let v2 = v.rows(n, n).into_owned();
    let sv = singular_values(&v1);
    let (top, bottom) = (sv[0], *sv.last().unwrap());
    if top == 0.0 || bottom / top < 1e-12 {
        return Err(LinalgError::IllConditioned {
            reason: format!(
                "invariant subspace basis has condition {:.3e}",
                if bottom == 0.0 { f64::INFINITY } else { top / bottom }
            ),
        });
    }
    // X V1 = V2  <=>  V1^H X^H = V2^H
    let xh = v1
        .adjoint()
        .lu()
        .solve(&v2.adjoint())
        .ok_or(LinalgError::Singular("riccati graph basis"))?;
    Ok(hermitian_part(&xh.adjoint()))
}

/// Stabilizing solution of `A^H X + X A - X G X + Q = 0` with default tolerances.
pub fn solve_are(a: &CMat, g: &CMat, q: &CMat) -> Result<AreSolution, LinalgError> {
    solve_are_with(a, g, q, &Tolerances::default())
}

/// Stabilizing solution: `A - G X` Hurwitz. Fails when the Hamiltonian has
/// eigenvalues within `tol.axis * |H|_F` of the imaginary axis.
pub fn solve_are_with(
    a: &CMat,
    g: &CMat,
    q: &CMat,
    tol: &Tolerances,
) -> Result<AreSolution, LinalgError> {
    let n = validate(a, g, q)?;
    let qnorm = q.norm();
    let res_scale = qnorm.max(1.0);
    if n == 0 {
        return Ok(AreSolution {
            x: CMat::zeros(0, 0),
            residual: 0.0,
            relative_residual: 0.0,
            closed_loop_abscissa: f64::NEG_INFINITY,
            refinement_steps: 0,
        });
    }

    // Q = 0 with A Hurwitz: X = 0 is the stabilizing solution.
    if q.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        let abscissa = spectral_abscissa(a)?;
        if abscissa < -1e-10 * a.norm().max(ABS_FLOOR) {
            return Ok(AreSolution {
                x: CMat::zeros(n, n),
                residual: 0.0,
                relative_residual: 0.0,
                closed_loop_abscissa: abscissa,
                refinement_steps: 0,
            });
        }
    }

    let h = hamiltonian(a, g, q);
    let scale = h.norm().max(ABS_FLOOR);
    let (mut u, mut t) = schur_raw(&h)?;
    let axis_tol = tol.axis * scale;
    let mut stable = 0;
    for i in 0..2 * n {
        let re = t[(i, i)].re;
        if re.abs() <= axis_tol {
            return Err(LinalgError::NoStabilizingSolution {
                reason: format!(
                    "Hamiltonian eigenvalue {} lies within {:.1e} of the imaginary axis",
                    t[(i, i)],
                    axis_tol
                ),
            });
        }
        if re < 0.0 {
            stable += 1;
        }
    }
    if stable != n {
        return Err(LinalgError::NoStabilizingSolution {
            reason: format!("Hamiltonian has {stable} stable eigenvalues, expected {n}"),
        });
    }
    reorder(&mut u, &mut t, |z| z.re < 0.0)?;
    let basis = u.columns(0, n).into_owned();
    let mut x = graph_solution(&basis, n)?;

    let mut residual = are_residual(a, g, q, &x).norm();
    let mut steps = 0;
    // Newton-Kleinman refinement from the subspace solution.
    while steps < 4 && residual > 1e-14 * res_scale {
        let closed = a - g * &x;
        let rhs = &x * g * &x + q;
        let Ok(next) = solve_lyapunov(&closed.adjoint(), &rhs) else { break };
        let next = hermitian_part(&next);
        let next_res = are_residual(a, g, q, &next).norm();
        if !(next_res < residual) {
            break;
        }
        x = next;
        residual = next_res;
        steps += 1;
    }

    let closed_loop_abscissa = spectral_abscissa(&(a - g * &x))?;
    if closed_loop_abscissa >= -1e-10 * scale {
        return Err(LinalgError::NoStabilizingSolution {
            reason: format!("closed-loop spectral abscissa {closed_loop_abscissa:.3e} is not negative"),
        });
    }
    let relative_residual = residual / res_scale;
    if relative_residual > tol.are_residual {
        return Err(LinalgError::IllConditioned {
            reason: format!("Riccati residual {relative_residual:.3e} exceeds {:.1e}", tol.are_residual),
        });
    }
    Ok(AreSolution {
        x,
        residual,
        relative_residual,
        closed_loop_abscissa,
        refinement_steps: steps,
    })
}

/// Stabilizing solution of `A^H X + X A - X B R^-1 B^H X + Q = 0`.
pub fn solve_care(a: &CMat, b: &CMat, q: &CMat, r: &CMat) -> Result<AreSolution, LinalgError> {
    let n = check_square(a)?;
    let m = check_square(r)?;
    if b.nrows() != n || b.ncols() != m {
        return Err(LinalgError::DimensionMismatch(format!(
            "care: B is {}x{}, expected {n}x{m}",
            b.nrows(),
            b.ncols()
        )));
    }
    if !is_hermitian(r, 1e-10) {
        return Err(LinalgError::DimensionMismatch("care: R is not Hermitian".into()));
    }
    let r_inv = inverse(r)?;
    let g = hermitian_part(&(b * r_inv * b.adjoint()));
    solve_are(a, &g, q)
}

/// Extremal solution of `A^H X + X A - X G X + Q = 0` allowing Hamiltonian
/// eigenvalues on the imaginary axis.
///
/// Axis eigenvalues are grouped into clusters; each cluster of size `2k` must
/// have geometric multiplicity exactly `k` (Jordan blocks of size two), in
/// which case its eigenvectors complete the strictly stable (or unstable)
/// subspace to a Lagrangian one.
pub fn solve_are_extremal(
    a: &CMat,
    g: &CMat,
    q: &CMat,
    branch: Branch,
) -> Result<ExtremalSolution, LinalgError> {
    let n = validate(a, g, q)?;
    let res_scale = q.norm().max(1.0);
    let h = hamiltonian(a, g, q);
    let scale = h.norm().max(ABS_FLOOR);
    let (mut u, mut t) = schur_raw(&h)?;
    // Jordan blocks on the axis split into eigenvalues about sqrt(eps) apart.
    let axis_tol = 1e-6 * scale;
    let on_side = |z: Complex64| match branch {
        Branch::Stabilizing => z.re < -axis_tol,
        Branch::AntiStabilizing => z.re > axis_tol,
    };
    let vals: Vec<Complex64> = (0..2 * n).map(|i| t[(i, i)]).collect();
    let side = vals.iter().filter(|z| on_side(**z)).count();
    let mut axis: Vec<Complex64> = vals.iter().copied().filter(|z| z.re.abs() <= axis_tol).collect();
    // Odd totals are reported per cluster below.
    if axis.len() % 2 == 0 && side + axis.len() / 2 != n {
        return Err(LinalgError::NoStabilizingSolution {
            reason: format!(
                "{side} eigenvalues on the requested side and {} on the axis cannot form an {n}-dimensional Lagrangian subspace",
                axis.len()
            ),
        });
    }
    reorder(&mut u, &mut t, on_side)?;
    let mut basis = CMat::zeros(2 * n, n);
    basis.columns_mut(0, side).copy_from(&u.columns(0, side));

    axis.sort_by(|x, y| x.im.total_cmp(&y.im));
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for z in axis.iter().copied() {
        match clusters.last_mut() {
            Some(last) if (z.im - last.last().unwrap().im).abs() <= 1e-5 * scale => last.push(z),
            _ => clusters.push(vec![z]),
        }
    }
    let mut col = side;
    for cluster in &clusters {
        let size = cluster.len();
        let center = Complex64::new(0.0, cluster.iter().map(|z| z.im).sum::<f64>() / size as f64);
        if size % 2 != 0 {
            return Err(LinalgError::OddAxisMultiplicity { frequency: center.im });
        }
        let mut shifted = h.clone();
        for i in 0..2 * n {
            shifted[(i, i)] -= center;
        }
        let sv = singular_values(&shifted);
        let nullity = sv.iter().filter(|&&s| s <= 1e-8 * scale).count();
        if nullity != size / 2 {
            return Err(LinalgError::IllConditioned {
                reason: format!(
                    "axis eigenvalue cluster at {center} of size {size} has geometric multiplicity {nullity}"
                ),
            });
        }
        let kernel = null_space(&shifted, size / 2);
        basis.columns_mut(col, size / 2).copy_from(&kernel);
        col += size / 2;
    }
    let x = graph_solution(&basis, n)?;
    let residual = are_residual(a, g, q, &x).norm();
    Ok(ExtremalSolution {
        x,
        branch,
        residual,
        relative_residual: residual / res_scale,
        axis_eigenvalues: axis.len(),
    })
}
