use num_complex::Complex64;

use super::schur::schur_raw;
use super::{check_finite, check_square, CMat, LinalgError, EPS};

/// Eigenvalues with right eigenvectors stored column-wise in `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
}

impl EigenDecomposition {
    /// Largest `|A v - lambda v|` over all pairs, relative to `|A|_F`.
    pub fn max_relative_residual(&self, a: &CMat) -> f64 {
        let scale = a.norm().max(super::ABS_FLOOR);
        (0..self.values.len())
            .map(|i| {
                let v = self.vectors.column(i);
                (a * v - v * self.values[i]).norm() / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Deterministic ordering: real part ascending, then imaginary part ascending.
fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues only, sorted like [`eig`].
pub fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>, LinalgError> {
    check_square(a)?;
    check_finite(a, "eig input")?;
    let (scaled, _) = balance(a);
    let (_, t) = schur_raw(&scaled)?;
    let mut values: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    values.sort_by(sort_key);
    Ok(values)
}

/// Full eigendecomposition via balancing, Schur form and triangular
/// back-substitution. Eigenvectors have unit 2-norm.
pub fn eig(a: &CMat) -> Result<EigenDecomposition, LinalgError> {
    let n = check_square(a)?;
    check_finite(a, "eig input")?;
    let (scaled, d) = balance(a);
    let (u, t) = schur_raw(&scaled)?;
    let tnorm = t.norm().max(super::ABS_FLOOR);
    let small = EPS * tnorm;

    let mut vecs = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                sum += t[(i, j)] * x[j];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            x[i] = -sum / denom;
            // Rescale to avoid overflow on nearly defective matrices.
            let big = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                for z in x.iter_mut() {
                    *z /= big;
                }
            }
        }
        let xv = nalgebra::DVector::from_vec(x);
        let mut v = &u * xv;
        for r in 0..n {
            v[r] *= d[r];
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= Complex64::new(norm, 0.0);
        }
        vecs.set_column(k, &v);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sort_key(&t[(i, i)], &t[(j, j)]));
    let values = order.iter().map(|&i| t[(i, i)]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &vecs.column(src));
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. Returns `D^{-1} A D` and the diagonal of `D`.
fn balance(a: &CMat) -> (CMat, Vec<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut d = vec![1.0f64; n];
    const RADIX: f64 = 2.0;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / RADIX {
                cc *= RADIX;
                rr /= RADIX;
                f *= RADIX;
            }
            while cc >= rr * RADIX {
                cc /= RADIX;
                rr *= RADIX;
                f /= RADIX;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    (m, d)
}
