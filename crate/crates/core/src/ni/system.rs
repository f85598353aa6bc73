use num_complex::Complex64;

use super::poles::pole_clusters;
use super::NiError;
use crate::numlin::{
    hstack, inverse, rank, real_part, svd, to_complex, transfer_eval, vstack, CMat, ComplexStateSpace,
    RMat, ABS_FLOOR,
};

/// Real square LTI system `(A, B, C, D)` with `A` n x n, `B` n x m, `C` m x n
/// and `D` m x m.
#[derive(Debug, Clone, PartialEq)]
pub struct RealStateSpace {
    pub a: RMat,
    pub b: RMat,
    pub c: RMat,
    pub d: RMat,
}

/// Outcome of the PBH rank tests.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub controllable: bool,
    pub observable: bool,
    /// Eigenvalues at which a rank test failed.
    pub uncontrollable_modes: Vec<Complex64>,
    pub unobservable_modes: Vec<Complex64>,
}

impl MinimalityReport {
    pub fn is_minimal(&self) -> bool {
        self.controllable && self.observable
    }
}

const PBH_RANK_TOL: f64 = 1e-9;

impl RealStateSpace {
    pub fn new(a: RMat, b: RMat, c: RMat, d: RMat) -> Result<Self, NiError> {
        let n = a.nrows();
        let m = d.nrows();
        if a.ncols() != n || b.nrows() != n || c.ncols() != n || d.ncols() != m || b.ncols() != m || c.nrows() != m {
            return Err(NiError::DimensionMismatch(format!(
                "expected A n x n, B n x m, C m x n, D m x m; got A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        for (mat, name) in [(&a, "A"), (&b, "B"), (&c, "C"), (&d, "D")] {
            if mat.iter().any(|x| !x.is_finite()) {
                return Err(crate::numlin::LinalgError::NonFinite(name).into());
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn strictly_proper(a: RMat, b: RMat, c: RMat) -> Result<Self, NiError> {
        let m = c.nrows();
        Self::new(a, b, c, RMat::zeros(m, m))
    }

    /// Scalar first-order helper: `(a, b, c, d)` as 1x1 matrices.
    pub fn scalar(a: f64, b: f64, c: f64, d: f64) -> Self {
        let one = |x| RMat::from_element(1, 1, x);
        Self::new(one(a), one(b), one(c), one(d)).expect("1x1 blocks are consistent")
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn ports(&self) -> usize {
        self.d.nrows()
    }

    pub fn to_complex(&self) -> ComplexStateSpace {
        ComplexStateSpace {
            a: to_complex(&self.a),
            b: to_complex(&self.b),
            c: to_complex(&self.c),
            d: to_complex(&self.d),
        }
    }

    pub fn eval(&self, s: Complex64) -> Result<CMat, NiError> {
        Ok(transfer_eval(&self.to_complex(), s)?)
    }

    /// `M(0)`; fails if the origin is a pole.
    pub fn dc_gain(&self) -> Result<RMat, NiError> {
        Ok(real_part(&self.eval(Complex64::new(0.0, 0.0))?))
    }

    /// `(T A T^-1, T B, C T^-1, D)`.
    pub fn similarity(&self, t: &RMat) -> Result<Self, NiError> {
        let t_inv = real_part(&inverse(&to_complex(t))?);
        Self::new(t * &self.a * &t_inv, t * &self.b, &self.c * &t_inv, self.d.clone())
    }

    pub fn minimality(&self) -> Result<MinimalityReport, NiError> {
        let a = to_complex(&self.a);
        let b = to_complex(&self.b);
        let c = to_complex(&self.c);
        let n = self.states();
        let mut report = MinimalityReport {
            controllable: true,
            observable: true,
            uncontrollable_modes: Vec::new(),
            unobservable_modes: Vec::new(),
        };
        for cluster in pole_clusters(&a)? {
            let lambda = cluster.centroid;
            let mut shifted = -&a;
            for i in 0..n {
                shifted[(i, i)] += lambda;
            }
            if rank(&hstack(&shifted, &b), PBH_RANK_TOL) < n {
                report.controllable = false;
                report.uncontrollable_modes.push(lambda);
            }
            if rank(&vstack(&shifted, &c), PBH_RANK_TOL) < n {
                report.observable = false;
                report.unobservable_modes.push(lambda);
            }
        }
        Ok(report)
    }

    pub fn is_minimal(&self) -> Result<bool, NiError> {
        Ok(self.minimality()?.is_minimal())
    }

    /// Minimal realization: restriction to the controllable subspace, then
    /// projection onto the orthogonal complement of the unobservable one.
    /// Krylov vectors are kept when their singular values exceed `rel_tol`
    /// times the largest one.
    pub fn minimal_realization(&self, rel_tol: f64) -> Result<Self, NiError> {
        let q = krylov_basis(&self.a, &self.b, rel_tol);
        let (a, b, c) = (q.transpose() * &self.a * &q, q.transpose() * &self.b, &self.c * &q);
        let q = krylov_basis(&a.transpose(), &c.transpose(), rel_tol);
        Self::new(q.transpose() * &a * &q, q.transpose() * &b, &c * &q, self.d.clone())
    }
}

/// Orthonormal basis of `span [B, AB, A^2 B, ...]`.
fn krylov_basis(a: &RMat, b: &RMat, rel_tol: f64) -> RMat {
    let n = a.nrows();
    let scale = b.norm().max(ABS_FLOOR);
    let mut basis = RMat::zeros(n, 0);
    let mut block = b.clone();
    while basis.ncols() < n && block.ncols() > 0 {
        // Two passes of Gram-Schmidt against the current basis.
        for _ in 0..2 {
            block -= &basis * (basis.transpose() * &block);
        }
        let d = svd(&to_complex(&block));
        let keep = d.s.iter().filter(|&&s| s > rel_tol * scale).count().min(n - basis.ncols());
        if keep == 0 {
            break;
        }
        let fresh = real_part(&d.u.columns(0, keep).into_owned());
        let mut next = RMat::zeros(n, basis.ncols() + keep);
        next.columns_mut(0, basis.ncols()).copy_from(&basis);
        next.columns_mut(basis.ncols(), keep).copy_from(&fresh);
        basis = next;
        block = a * fresh * a.norm().max(ABS_FLOOR).recip() * scale;
    }
    basis
}
