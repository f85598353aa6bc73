use num_complex::Complex64;

use super::{DoubledSystem, QlinError};
use crate::numlin::{imag_part, real_part, to_complex, CMat, RMat};

const REAL_TOL: f64 = 1e-10;

/// Real quadrature-form system `dx = A x dt + B dw`, `dy = C x dt + D dw`
/// with variables ordered `(q1, p1, q2, p2, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSystem {
    pub a: RMat,
    pub b: RMat,
    pub c: RMat,
    pub d: RMat,
}

impl QuadratureSystem {
    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }
}

/// Maps `(a1..an, a1#..an#)` to `(q1, p1, ..., qn, pn)` with `q = a + a#` and
/// `p = -i a + i a#`.
pub fn quadrature_basis(n: usize) -> CMat {
    let mut phi = CMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        phi[(2 * k, k)] = Complex64::new(1.0, 0.0);
        phi[(2 * k, n + k)] = Complex64::new(1.0, 0.0);
        phi[(2 * k + 1, k)] = Complex64::new(0.0, -1.0);
        phi[(2 * k + 1, n + k)] = Complex64::new(0.0, 1.0);
    }
    phi
}

/// `Phi^-1 = Phi^H / 2`.
fn basis_inverse(n: usize) -> CMat {
    quadrature_basis(n).adjoint() * Complex64::new(0.5, 0.0)
}

fn realify(name: &str, m: &CMat) -> Result<RMat, QlinError> {
    let im = imag_part(m).norm();
    if im > REAL_TOL * m.norm().max(1.0) {
        return Err(QlinError::StructureViolated(format!("{name} has imaginary part {im:e} in quadrature form")));
    }
    Ok(real_part(m))
}

pub fn quadrature_transform(sys: &DoubledSystem) -> Result<QuadratureSystem, QlinError> {
    sys.check_structure()?;
    let (n, m) = (sys.modes(), sys.fields());
    let (pn, pm) = (quadrature_basis(n), quadrature_basis(m));
    let (pn_inv, pm_inv) = (basis_inverse(n), basis_inverse(m));
    Ok(QuadratureSystem {
        a: realify("A", &(&pn * &sys.f * &pn_inv))?,
        b: realify("B", &(&pn * &sys.g * &pm_inv))?,
        c: realify("C", &(&pm * &sys.h * &pn_inv))?,
        d: realify("D", &(&pm * &sys.k * &pm_inv))?,
    })
}

pub fn quadrature_inverse(sys: &QuadratureSystem) -> Result<DoubledSystem, QlinError> {
    let (s, w, y) = (sys.states(), sys.inputs(), sys.outputs());
    if s % 2 != 0 || w % 2 != 0 || y != w || sys.d.shape() != (y, w) || sys.a.shape() != (s, s) {
        return Err(QlinError::DimensionMismatch(format!(
            "quadrature system with {s} states, {w} inputs, {y} outputs has no doubled-up form"
        )));
    }
    let (n, m) = (s / 2, w / 2);
    let (pn, pm) = (quadrature_basis(n), quadrature_basis(m));
    let (pn_inv, pm_inv) = (basis_inverse(n), basis_inverse(m));
    Ok(DoubledSystem {
        f: &pn_inv * to_complex(&sys.a) * &pn,
        g: &pn_inv * to_complex(&sys.b) * &pm,
        h: &pm_inv * to_complex(&sys.c) * &pn,
        k: &pm_inv * to_complex(&sys.d) * &pm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{build_qsde, QuantumSpec};

    fn c(re: f64) -> CMat {
        CMat::from_element(1, 1, Complex64::new(re, 0.0))
    }

    #[test]
    fn cavity_on_resonance() {
        let kappa: f64 = 3.0;
        let spec = QuantumSpec { m1: c(0.0), m2: c(0.0), n1: c(kappa.sqrt()), n2: c(0.0), s: c(1.0) };
        let q = quadrature_transform(&build_qsde(&spec).unwrap()).unwrap();
        assert!((q.a + RMat::identity(2, 2) * (kappa / 2.0)).norm() < 1e-14);
        assert!((q.b + RMat::identity(2, 2) * kappa.sqrt()).norm() < 1e-14);
        assert!((q.c - RMat::identity(2, 2) * kappa.sqrt()).norm() < 1e-14);
        assert_eq!(q.d, RMat::identity(2, 2));
    }

    #[test]
    fn identity_scattering_zero_dynamics() {
        let spec = QuantumSpec { m1: c(0.0), m2: c(0.0), n1: c(0.0), n2: c(0.0), s: c(1.0) };
        let q = quadrature_transform(&build_qsde(&spec).unwrap()).unwrap();
        assert_eq!(q.a, RMat::zeros(2, 2));
        assert_eq!(q.d, RMat::identity(2, 2));
    }

    #[test]
    fn basis_inverse_is_exact() {
        for n in 1..4 {
            let p = quadrature_basis(n);
            assert!((&p * basis_inverse(n) - CMat::identity(2 * n, 2 * n)).norm() < 1e-15);
        }
    }

    #[test]
    fn non_doubled_input_rejected() {
        let mut sys = build_qsde(&QuantumSpec { m1: c(1.0), m2: c(0.0), n1: c(1.0), n2: c(0.0), s: c(1.0) }).unwrap();
        sys.f[(1, 1)] = Complex64::new(0.0, 5.0);
        assert!(matches!(quadrature_transform(&sys), Err(QlinError::StructureViolated(_))));
    }
}
