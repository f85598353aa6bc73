use num_complex::Complex64;

use super::{QlinError, QuadratureSystem};
use crate::numlin::{block_diag, imag_part, real_part, to_complex, vstack, CMat, RMat};

const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Hamiltonian `1/2 x^T R x` and coupling `L = Lambda x` of a system with
/// `n_y` outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysRealSpec {
    pub r: RMat,
    pub lambda: CMat,
    pub n_y: usize,
}

impl PhysRealSpec {
    pub fn states(&self) -> usize {
        self.r.nrows()
    }

    /// Number of real field quadratures, twice the number of couplings.
    pub fn n_w(&self) -> usize {
        2 * self.lambda.nrows()
    }

    pub fn validate(&self) -> Result<(), QlinError> {
        let n = self.states();
        if self.r.ncols() != n || self.lambda.ncols() != n {
            return Err(QlinError::DimensionMismatch(format!(
                "R is {}x{}, Lambda is {}x{}",
                self.r.nrows(),
                self.r.ncols(),
                self.lambda.nrows(),
                self.lambda.ncols()
            )));
        }
        if n % 2 != 0 {
            return Err(QlinError::DimensionMismatch(format!("state dimension {n} is odd")));
        }
        if self.n_y % 2 != 0 || self.n_y > self.n_w() {
            return Err(QlinError::DimensionMismatch(format!("n_y = {} with n_w = {}", self.n_y, self.n_w())));
        }
        let asym = (&self.r - self.r.transpose()).norm();
        if asym > 1e-10 * self.r.norm().max(1.0) {
            return Err(QlinError::SpecInvariantViolated(format!("R is not symmetric (|R - R^T| = {asym:e})")));
        }
        Ok(())
    }
}

/// Block diagonal of `[[0, 1], [-1, 0]]`; `n` must be even.
pub fn theta(n: usize) -> RMat {
    assert!(n % 2 == 0, "theta needs an even dimension");
    let mut t = RMat::zeros(n, n);
    for k in 0..n / 2 {
        t[(2 * k, 2 * k + 1)] = 1.0;
        t[(2 * k + 1, 2 * k)] = -1.0;
    }
    t
}

/// `P` with `P [a1, a2, ..., a2m] = [a1, a3, ..., a2m-1, a2, a4, ..., a2m]`.
pub fn interleave_permutation(n: usize) -> RMat {
    assert!(n % 2 == 0, "permutation needs an even dimension");
    let mut p = RMat::zeros(n, n);
    let half = n / 2;
    for k in 0..half {
        p[(k, 2 * k)] = 1.0;
        p[(half + k, 2 * k + 1)] = 1.0;
    }
    p
}

/// `Gamma = P diag(M)` with `M = 1/2 [[1, i], [1, -i]]`.
pub fn gamma_matrix(n_w: usize) -> CMat {
    let half = Complex64::new(0.5, 0.0);
    let m = CMat::from_row_slice(2, 2, &[half, Complex64::new(0.0, 0.5), half, Complex64::new(0.0, -0.5)]);
    let blocks: Vec<&CMat> = (0..n_w / 2).map(|_| &m).collect();
    to_complex(&interleave_permutation(n_w)) * block_diag(&blocks)
}

fn realify(name: &str, m: &CMat) -> Result<RMat, QlinError> {
    let im = imag_part(m).norm();
    if im > 1e-10 * m.norm().max(1.0) {
        return Err(QlinError::StructureViolated(format!("{name} came out complex (imaginary norm {im:e})")));
    }
    Ok(real_part(m))
}

/// `A = 2 Theta (R + Im(Lambda^H Lambda))`, `B = 2i Theta [-Lambda^H, Lambda^T] Gamma`,
/// `C = P^T diag(Sigma, Sigma) [Lambda + Lambda#; -i Lambda + i Lambda#]`, `D = [I 0]`.
pub fn physreal_construct(spec: &PhysRealSpec) -> Result<QuadratureSystem, QlinError> {
    spec.validate()?;
    let n = spec.states();
    let (n_w, n_y) = (spec.n_w(), spec.n_y);
    let th = theta(n);
    let lam = &spec.lambda;
    let lam_conj = lam.map(|z| z.conj());
    let i = Complex64::new(0.0, 1.0);

    let a = (&th * (&spec.r + imag_part(&(lam.adjoint() * lam)))) * 2.0;
    let mut coupling = CMat::zeros(n, n_w);
    coupling.columns_mut(0, n_w / 2).copy_from(&(-lam.adjoint()));
    coupling.columns_mut(n_w / 2, n_w / 2).copy_from(&lam.transpose());
    let b = realify("B", &(to_complex(&th) * coupling * gamma_matrix(n_w) * (i * 2.0)))?;

    let (sel, all) = (n_y / 2, n_w / 2);
    let sigma = CMat::from_fn(sel, all, |r, c| Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0));
    let stacked = vstack(&(lam + &lam_conj), &((&lam_conj - lam) * i));
    let c = if n_y == 0 {
        RMat::zeros(0, n)
    } else {
        let p = to_complex(&interleave_permutation(n_y));
        realify("C", &(p.transpose() * block_diag(&[&sigma, &sigma]) * stacked))?
    };
    let d = RMat::from_fn(n_y, n_w, |r, col| if r == col { 1.0 } else { 0.0 });
    Ok(QuadratureSystem { a, b, c, d })
}

/// Recovers `(R, Lambda)` from a system built by [`physreal_construct`] and
/// checks that they regenerate it.
pub fn extract_physreal(sys: &QuadratureSystem) -> Result<PhysRealSpec, QlinError> {
    let n = sys.states();
    let (n_w, n_y) = (sys.inputs(), sys.outputs());
    if n % 2 != 0 || n_w % 2 != 0 || n_y % 2 != 0 || sys.b.nrows() != n || sys.c.ncols() != n {
        return Err(QlinError::DimensionMismatch(format!("{n} states, {n_w} inputs, {n_y} outputs")));
    }
    let th = theta(n);
    let half = -(&th * &sys.a) * 0.5;
    let r = (&half + half.transpose()) * 0.5;
    let mut lambda = CMat::zeros(n_w / 2, n);
    for j in 0..n_w / 2 {
        let im = &th * sys.b.column(2 * j) * 0.5;
        let re = -(&th * sys.b.column(2 * j + 1)) * 0.5;
        for k in 0..n {
            lambda[(j, k)] = Complex64::new(re[k], im[k]);
        }
    }
    let spec = PhysRealSpec { r, lambda, n_y };
    let rebuilt = physreal_construct(&spec)?;
    let scale = sys.a.norm().max(sys.b.norm()).max(sys.c.norm()).max(1.0);
    let err = (&rebuilt.a - &sys.a).norm() + (&rebuilt.b - &sys.b).norm() + (&rebuilt.c - &sys.c).norm() + (&rebuilt.d - &sys.d).norm();
    if err > RECONSTRUCTION_TOL * scale {
        return Err(QlinError::StructureViolated(format!(
            "system is not of the physically realizable form (reconstruction error {err:e})"
        )));
    }
    Ok(spec)
}

/// Norms of the physical realizability identities of a quadrature system
/// whose first `n_y` inputs are the direct feedthrough noises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizabilityResidual {
    /// `|A Theta + Theta A^T + B Theta B^T|`.
    pub lyapunov: f64,
    /// `|B[:, ..n_y] - Theta C^T Theta|`.
    pub feedthrough: f64,
    /// `|D - [I 0]|`.
    pub d_form: f64,
}

impl RealizabilityResidual {
    pub fn max(&self) -> f64 {
        self.lyapunov.max(self.feedthrough).max(self.d_form)
    }
}

pub fn realizability_residual(sys: &QuadratureSystem) -> Result<RealizabilityResidual, QlinError> {
    let n = sys.states();
    let (n_w, n_y) = (sys.inputs(), sys.outputs());
    if n % 2 != 0 || n_w % 2 != 0 || n_y % 2 != 0 || n_y > n_w {
        return Err(QlinError::DimensionMismatch(format!("{n} states, {n_w} inputs, {n_y} outputs")));
    }
    let (th, tw, ty) = (theta(n), theta(n_w), theta(n_y));
    let lyapunov = (&sys.a * &th + &th * sys.a.transpose() + &sys.b * tw * sys.b.transpose()).norm();
    let feedthrough = (sys.b.columns(0, n_y) - &th * sys.c.transpose() * ty).norm();
    let d_form = (&sys.d - RMat::from_fn(n_y, n_w, |r, c| if r == c { 1.0 } else { 0.0 })).norm();
    Ok(RealizabilityResidual { lyapunov, feedthrough, d_form })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_mode_cavity() {
        let kappa: f64 = 2.0;
        let k = kappa.sqrt() / 2.0;
        let spec = PhysRealSpec { r: RMat::zeros(2, 2), lambda: CMat::from_row_slice(1, 2, &[c(k, 0.0), c(0.0, k)]), n_y: 2 };
        let sys = physreal_construct(&spec).unwrap();
        assert!((&sys.a + RMat::identity(2, 2) * (kappa / 2.0)).norm() < 1e-14);
        assert!((&sys.b + RMat::identity(2, 2) * kappa.sqrt()).norm() < 1e-14);
        assert!((&sys.c - RMat::identity(2, 2) * kappa.sqrt()).norm() < 1e-14);
        assert!(realizability_residual(&sys).unwrap().max() < 1e-14);
    }

    #[test]
    fn closed_system() {
        let r = RMat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        let spec = PhysRealSpec { r: r.clone(), lambda: CMat::zeros(1, 2), n_y: 0 };
        let sys = physreal_construct(&spec).unwrap();
        assert_eq!(sys.a, theta(2) * r * 2.0);
        assert_eq!(sys.b, RMat::zeros(2, 2));
        assert_eq!(sys.c.nrows(), 0);
    }

    #[test]
    fn feedthrough_shape() {
        let spec = PhysRealSpec { r: RMat::zeros(2, 2), lambda: CMat::zeros(2, 2), n_y: 2 };
        let sys = physreal_construct(&spec).unwrap();
        assert_eq!(sys.d, RMat::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn permutation_groups_odd_and_even_entries() {
        let p = interleave_permutation(6);
        let v = RMat::from_column_slice(6, 1, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!((p * v).as_slice(), &[1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn extraction_round_trip() {
        let r = RMat::from_row_slice(4, 4, &[1.0, 0.2, -0.1, 0.0, 0.2, 0.5, 0.3, 0.1, -0.1, 0.3, -0.7, 0.4, 0.0, 0.1, 0.4, 0.9]);
        let lambda = CMat::from_row_slice(2, 4, &[c(0.3, 0.1), c(-0.2, 0.4), c(0.0, 0.5), c(0.1, 0.0), c(0.6, -0.2), c(0.1, 0.1), c(-0.3, 0.0), c(0.2, 0.2)]);
        let spec = PhysRealSpec { r, lambda, n_y: 2 };
        let sys = physreal_construct(&spec).unwrap();
        assert!(realizability_residual(&sys).unwrap().max() < 1e-13);
        let back = extract_physreal(&sys).unwrap();
        assert!((&back.r - &spec.r).norm() < 1e-13);
        assert!((&back.lambda - &spec.lambda).norm() < 1e-13);
    }

    #[test]
    fn non_realizable_rejected() {
        let sys = QuadratureSystem {
            a: RMat::identity(2, 2) * -0.5,
            b: RMat::identity(2, 2) * -1.0,
            c: RMat::identity(2, 2) * 2.0,
            d: RMat::identity(2, 2),
        };
        assert!(matches!(extract_physreal(&sys), Err(QlinError::StructureViolated(_))));
    }
}
