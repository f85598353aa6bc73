//! Complex Schur decomposition and eigenvalue reordering.

use num_complex::Complex64;

use super::{check_finite, check_square, CMat, LinalgError, ABS_FLOOR, EPS};

/// `A = U T U^H` with `U` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub u: CMat,
    pub t: CMat,
    /// Number of leading diagonal entries of `T` that satisfy the selection
    /// predicate (all of them for an unordered decomposition).
    pub selected: usize,
    pub ordering: String,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    pub fn reconstruct(&self) -> CMat {
        &self.u * &self.t * self.u.adjoint()
    }
}

/// Unordered complex Schur decomposition.
pub fn schur(a: &CMat) -> Result<SchurForm, LinalgError> {
    let n = check_square(a)?;
    check_finite(a, "schur input")?;
    let (u, t) = schur_raw(a)?;
    Ok(SchurForm {
        u,
        t,
        selected: n,
        ordering: "unordered".into(),
    })
}

/// Schur decomposition whose leading diagonal block holds exactly the
/// eigenvalues accepted by `select`.
pub fn ordered_schur<F>(a: &CMat, select: F) -> Result<SchurForm, LinalgError>
where
    F: Fn(Complex64) -> bool,
{
    ordered_schur_labeled(a, select, "custom predicate")
}

pub(crate) fn ordered_schur_labeled<F>(
    a: &CMat,
    select: F,
    label: &str,
) -> Result<SchurForm, LinalgError>
where
    F: Fn(Complex64) -> bool,
{
    check_square(a)?;
    check_finite(a, "ordered_schur input")?;
    let (mut u, mut t) = schur_raw(a)?;
    let selected = reorder(&mut u, &mut t, select)?;
    Ok(SchurForm {
        u,
        t,
        selected,
        ordering: label.to_string(),
    })
}

/// Spectral projector onto the invariant subspace of the eigenvalues accepted
/// by `select`, along the complementary invariant subspace. Returns the
/// projector and the dimension of its range.
pub fn spectral_projector<F>(a: &CMat, select: F) -> Result<(CMat, usize), LinalgError>
where
    F: Fn(Complex64) -> bool,
{
    let n = check_square(a)?;
    check_finite(a, "spectral_projector input")?;
    let (mut u, mut t) = schur_raw(a)?;
    let k = reorder(&mut u, &mut t, select)?;
    let mut block = CMat::zeros(n, n);
    for i in 0..k {
        block[(i, i)] = Complex64::new(1.0, 0.0);
    }
    if k > 0 && k < n {
        let t11 = t.view((0, 0), (k, k)).into_owned();
        let t12 = t.view((0, k), (k, n - k)).into_owned();
        let t22 = t.view((k, k), (n - k, n - k)).into_owned();
        // T11 Y - Y T22 = -T12 block-diagonalizes T.
        let y = super::solve_sylvester(&t11, &(-t22), &(-t12))?;
        block.view_mut((0, k), (k, n - k)).copy_from(&(-y));
    }
    Ok((&u * block * u.adjoint(), k))
}

pub(crate) fn schur_raw(a: &CMat) -> Result<(CMat, CMat), LinalgError> {
    let n = a.nrows();
    let mut h = a.clone();
    let mut u = CMat::identity(n, n);
    if n == 0 {
        return Ok((u, h));
    }
    hessenberg(&mut h, &mut u);
    hessenberg_qr(&mut h, &mut u)?;
    // Clean the strictly lower part left by rounding.
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((u, h))
}

/// Householder reduction to upper Hessenberg form, accumulating into `u`.
fn hessenberg(h: &mut CMat, u: &mut CMat) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let len = n - k - 1;
        let mut v: Vec<Complex64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2 v v^H) H on rows k+1..n
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..len {
                dot += v[i].conj() * h[(k + 1 + i, j)];
            }
            dot *= 2.0;
            for i in 0..len {
                h[(k + 1 + i, j)] -= v[i] * dot;
            }
        }
        // H <- H (I - 2 v v^H), U <- U (I - 2 v v^H) on columns k+1..n
        for m in [&mut *h, &mut *u] {
            for r in 0..n {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..len {
                    dot += m[(r, k + 1 + i)] * v[i];
                }
                dot *= 2.0;
                for i in 0..len {
                    m[(r, k + 1 + i)] -= dot * v[i].conj();
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` with real `c` that annihilates `b` in `(a, b)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

fn rotate_rows(m: &mut CMat, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = m[(k, j)];
        let y = m[(k + 1, j)];
        m[(k, j)] = x * c + s * y;
        m[(k + 1, j)] = -s.conj() * x + y * c;
    }
}

fn rotate_cols(m: &mut CMat, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = m[(i, k)];
        let y = m[(i, k + 1)];
        m[(i, k)] = x * c + s.conj() * y;
        m[(i, k + 1)] = -s * x + y * c;
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = (a + d) * 0.5 + disc;
    let mu2 = (a + d) * 0.5 - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Shifted QR on an upper Hessenberg matrix. The iteration budget is `100 n`
/// sweeps in total.
fn hessenberg_qr(h: &mut CMat, u: &mut CMat) -> Result<(), LinalgError> {
    let n = h.nrows();
    let cap = 100 * n.max(1);
    let hnorm = h.norm().max(ABS_FLOOR);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        // Look for a negligible subdiagonal entry.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = hnorm;
            }
            if sub <= EPS * diag || sub <= EPS * EPS * hnorm {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(LinalgError::ConvergenceFailure { iterations: total });
        }
        let shift = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            let sub = h[(hi, hi - 1)].norm();
            let sub2 = if hi >= lo + 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(0.75 * (sub + sub2), 0.4375 * sub)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotate_rows(h, k, c, s, k..n);
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let last = (k + 2).min(hi + 1);
            rotate_cols(h, k, c, s, 0..last);
            rotate_cols(u, k, c, s, 0..n);
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(())
}

/// Moves every diagonal entry accepted by `select` to the top of `t`,
/// preserving the relative order within each group. Returns the number of
/// selected eigenvalues.
pub(crate) fn reorder<F>(u: &mut CMat, t: &mut CMat, select: F) -> Result<usize, LinalgError>
where
    F: Fn(Complex64) -> bool,
{
    let n = t.nrows();
    let tnorm = t.norm().max(ABS_FLOOR);
    let mut target = 0usize;
    for j in 0..n {
        if !select(t[(j, j)]) {
            continue;
        }
        let mut k = j;
        while k > target {
            swap_adjacent(u, t, k - 1, tnorm)?;
            k -= 1;
        }
        target += 1;
    }
    Ok(target)
}

/// Exchanges the diagonal entries at `k` and `k + 1` with a 2x2 unitary.
fn swap_adjacent(u: &mut CMat, t: &mut CMat, k: usize, tnorm: f64) -> Result<(), LinalgError> {
    let n = t.nrows();
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let c = t[(k, k + 1)];
    let d = b - a;
    let r = c.norm().hypot(d.norm());
    if r == 0.0 {
        return Ok(());
    }
    // First column of Z is the eigenvector of [[a, c], [0, b]] for b.
    let z0 = c / r;
    let z1 = d / r;
    // Z = [[z0, -conj(z1)], [z1, conj(z0)]]
    for j in k..n {
        let x = t[(k, j)];
        let y = t[(k + 1, j)];
        t[(k, j)] = z0.conj() * x + z1.conj() * y;
        t[(k + 1, j)] = -z1 * x + z0 * y;
    }
    for (m, rows) in [(&mut *t, k + 2), (&mut *u, n)] {
        for i in 0..rows {
            let x = m[(i, k)];
            let y = m[(i, k + 1)];
            m[(i, k)] = x * z0 + y * z1;
            m[(i, k + 1)] = -x * z1.conj() + y * z0.conj();
        }
    }
    let residue = t[(k + 1, k)].norm();
    if residue > 1e-10 * tnorm {
        let condition = if d.norm() > 0.0 { c.norm() / d.norm() } else { f64::INFINITY };
        return Err(LinalgError::SwapFailure {
            position: k,
            condition,
        });
    }
    t[(k + 1, k)] = Complex64::new(0.0, 0.0);
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
    Ok(())
}
