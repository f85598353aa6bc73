//! One-sided Jacobi (Hestenes) singular value decomposition.

use num_complex::Complex64;

use super::CMat;

/// Thin SVD `A = U diag(s) V^H` with `s` descending, `U` m x k, `V` n x k,
/// `k = min(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

impl Svd {
    pub fn recompose(&self) -> CMat {
        let mut us = self.u.clone();
        for (j, &sj) in self.s.iter().enumerate() {
            us.column_mut(j).scale_mut(sj);
        }
        us * self.v.adjoint()
    }
}

pub fn svd(a: &CMat) -> Svd {
    if a.nrows() < a.ncols() {
        let t = tall_svd(&a.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    tall_svd(a)
}

fn tall_svd(a: &CMat) -> Svd {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = CMat::identity(n, n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma: Complex64 = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut w, &mut v] {
                    for r in 0..mat.nrows() {
                        let xp = mat[(r, p)];
                        let xq = mat[(r, q)] * phase.conj();
                        mat[(r, p)] = xp * c - xq * s;
                        mat[(r, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = CMat::zeros(m, n);
    let mut vs = CMat::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (col, &idx) in order.iter().enumerate() {
        let sigma = norms[idx];
        s.push(sigma);
        if sigma > 0.0 {
            u.set_column(col, &(w.column(idx) / Complex64::new(sigma, 0.0)));
        }
        vs.set_column(col, &v.column(idx));
    }
    Svd { u, s, v: vs }
}
