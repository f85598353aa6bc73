use num_complex::Complex64;

use super::QlinError;
use crate::numlin::{block2, block_diag, CMat};

const STRUCTURE_TOL: f64 = 1e-10;

/// Physical data of `n` oscillator modes coupled to `m` fields.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSpec {
    pub m1: CMat,
    pub m2: CMat,
    pub n1: CMat,
    pub n2: CMat,
    pub s: CMat,
}

/// Coefficients of `d[a; a#] = F [a; a#] dt + G d[A; A#]`,
/// `d[Aout; Aout#] = H [a; a#] dt + K d[A; A#]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledSystem {
    pub f: CMat,
    pub g: CMat,
    pub h: CMat,
    pub k: CMat,
}

impl DoubledSystem {
    pub fn modes(&self) -> usize {
        self.f.nrows() / 2
    }

    pub fn fields(&self) -> usize {
        self.k.nrows() / 2
    }

    pub fn check_structure(&self) -> Result<(), QlinError> {
        let (n2, m2) = (self.f.nrows(), self.k.nrows());
        let shapes = [
            ("F", &self.f, (n2, n2)),
            ("G", &self.g, (n2, m2)),
            ("H", &self.h, (m2, n2)),
            ("K", &self.k, (m2, m2)),
        ];
        for (name, mat, shape) in shapes {
            if mat.shape() != shape || shape.0 % 2 != 0 || shape.1 % 2 != 0 {
                return Err(QlinError::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {}x{}",
                    mat.nrows(),
                    mat.ncols(),
                    shape.0,
                    shape.1
                )));
            }
            if !is_doubled_up(mat, STRUCTURE_TOL) {
                return Err(QlinError::StructureViolated(format!("{name} lower blocks are not conjugates of the upper blocks")));
            }
        }
        Ok(())
    }
}

/// `[[X1, X2], [X2#, X1#]]` up to `tol` relative to `max(1, |X|)`.
pub fn is_doubled_up(x: &CMat, tol: f64) -> bool {
    let (r, c) = x.shape();
    if r % 2 != 0 || c % 2 != 0 {
        return false;
    }
    let (h, w) = (r / 2, c / 2);
    let bound = tol * x.norm().max(1.0);
    let top_left = x.view((0, 0), (h, w));
    let top_right = x.view((0, w), (h, w));
    let d1 = (x.view((h, w), (h, w)) - top_left.map(|z| z.conj())).norm();
    let d2 = (x.view((h, 0), (h, w)) - top_right.map(|z| z.conj())).norm();
    d1 <= bound && d2 <= bound
}

/// `diag(I_n, -I_n)`.
pub fn j_signature(n: usize) -> CMat {
    CMat::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i < n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

/// `[[X1, X2], [X2#, X1#]]`.
pub fn doubled(x1: &CMat, x2: &CMat) -> CMat {
    block2(x1, x2, &x2.map(|z| z.conj()), &x1.map(|z| z.conj()))
}

fn rel(x: f64, scale: f64) -> bool {
    x <= STRUCTURE_TOL * scale.max(1.0)
}

impl QuantumSpec {
    pub fn modes(&self) -> usize {
        self.m1.nrows()
    }

    pub fn fields(&self) -> usize {
        self.s.nrows()
    }

    pub fn validate(&self) -> Result<(), QlinError> {
        let n = self.m1.nrows();
        let m = self.s.nrows();
        let dims = [
            ("M1", &self.m1, (n, n)),
            ("M2", &self.m2, (n, n)),
            ("N1", &self.n1, (m, n)),
            ("N2", &self.n2, (m, n)),
            ("S", &self.s, (m, m)),
        ];
        for (name, mat, shape) in dims {
            if mat.shape() != shape {
                return Err(QlinError::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {}x{}",
                    mat.nrows(),
                    mat.ncols(),
                    shape.0,
                    shape.1
                )));
            }
            if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(QlinError::SpecInvariantViolated(format!("{name} has non-finite entries")));
            }
        }
        let herm = (&self.m1 - self.m1.adjoint()).norm();
        if !rel(herm, self.m1.norm()) {
            return Err(QlinError::SpecInvariantViolated(format!("M1 is not Hermitian (|M1 - M1^H| = {herm:e})")));
        }
        let sym = (&self.m2 - self.m2.transpose()).norm();
        if !rel(sym, self.m2.norm()) {
            return Err(QlinError::SpecInvariantViolated(format!("M2 is not symmetric (|M2 - M2^T| = {sym:e})")));
        }
        let unit = (self.s.adjoint() * &self.s - CMat::identity(m, m)).norm();
        if !rel(unit, 1.0) {
            return Err(QlinError::SpecInvariantViolated(format!("S is not unitary (|S^H S - I| = {unit:e})")));
        }
        Ok(())
    }

    /// `[[M1, M2], [M2#, M1#]]`.
    pub fn m_doubled(&self) -> CMat {
        doubled(&self.m1, &self.m2)
    }

    /// `[[N1, N2], [N2#, N1#]]`.
    pub fn n_doubled(&self) -> CMat {
        doubled(&self.n1, &self.n2)
    }
}

/// `F = -i J M - 1/2 J N^H J N`, `G = -J N^H diag(S, -S#)`, `H = N`,
/// `K = diag(S, S#)`.
pub fn build_qsde(spec: &QuantumSpec) -> Result<DoubledSystem, QlinError> {
    spec.validate()?;
    let (n, m) = (spec.modes(), spec.fields());
    let jn = j_signature(n);
    let jm = j_signature(m);
    let mm = spec.m_doubled();
    let nn = spec.n_doubled();
    let i = Complex64::new(0.0, 1.0);
    let f = -(&jn * &mm) * i - (&jn * nn.adjoint() * &jm * &nn) * Complex64::new(0.5, 0.0);
    let s_conj = spec.s.map(|z| z.conj());
    let g = -(&jn * nn.adjoint() * block_diag(&[&spec.s, &(-&s_conj)]));
    let k = block_diag(&[&spec.s, &s_conj]);
    let sys = DoubledSystem { f, g, h: nn, k };
    sys.check_structure()?;
    Ok(sys)
}
