use num_complex::Complex64;

use super::{check_finite, singular_values, CMat, LinalgError, ABS_FLOOR};

/// Complex state-space realization `(A, B, C, D)` with `A` n x n, `B` n x m,
/// `C` p x n and `D` p x m.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStateSpace {
    pub a: CMat,
    pub b: CMat,
    pub c: CMat,
    pub d: CMat,
}

impl ComplexStateSpace {
    pub fn new(a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self, LinalgError> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || c.ncols() != n || d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(LinalgError::DimensionMismatch(format!(
                "state space: A {}x{}, B {}x{}, C {}x{}, D {}x{}",
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
        check_finite(&a, "A")?;
        check_finite(&b, "B")?;
        check_finite(&c, "C")?;
        check_finite(&d, "D")?;
        Ok(Self { a, b, c, d })
    }

    /// Strictly proper system (`D = 0`).
    pub fn strictly_proper(a: CMat, b: CMat, c: CMat) -> Result<Self, LinalgError> {
        let d = CMat::zeros(c.nrows(), b.ncols());
        Self::new(a, b, c, d)
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn eval(&self, s: Complex64) -> Result<CMat, LinalgError> {
        transfer_eval(self, s)
    }

    /// `(T A T^-1, T B, C T^-1, D)`.
    pub fn similarity(&self, t: &CMat) -> Result<Self, LinalgError> {
        let t_inv = super::inverse(t)?;
        Self::new(t * &self.a * &t_inv, t * &self.b, &self.c * &t_inv, self.d.clone())
    }
}

/// Evaluates `C (sI - A)^-1 B + D`.
pub fn transfer_eval(sys: &ComplexStateSpace, s: Complex64) -> Result<CMat, LinalgError> {
    let n = sys.states();
    if n == 0 {
        return Ok(sys.d.clone());
    }
    let mut resolvent = -&sys.a;
    for i in 0..n {
        resolvent[(i, i)] += s;
    }
    let scale = sys.a.norm().max(ABS_FLOOR);
    let smin = singular_values(&resolvent).last().copied().unwrap_or(0.0);
    if smin <= 1e-12 * scale {
        return Err(LinalgError::PoleAtS { s });
    }
    let x = resolvent
        .lu()
        .solve(&sys.b)
        .ok_or(LinalgError::PoleAtS { s })?;
    Ok(&sys.c * x + &sys.d)
}
