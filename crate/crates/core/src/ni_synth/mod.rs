//! State-feedback synthesis making `(A + B2 K, B1, C1)` negative imaginary
//! while stabilizing the anti-stable part of `A - B2 (C1 B2)^-1 C1 A`.

use thiserror::Error;

use crate::ni::{ni_frequency_oracle_with, FrequencyGrid, NiClass, NiError, NiVerdict, RealStateSpace};
use crate::numlin::{
    eigenvalues, hermitian_eigenvalues, imag_part, inverse, ordered_schur, real_part, singular_values,
    solve_lyapunov, spectral_abscissa, to_complex, LinalgError, RMat, Tolerances, ABS_FLOOR,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NiSynthError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("C1 B2 is singular or not square (condition number {condition:e})")]
    C1B2Singular { condition: f64 },
    #[error("R = C1 B1 + B1^T C1^T is not positive definite (minimum eigenvalue {min_eigenvalue:e})")]
    RNotPositive { min_eigenvalue: f64 },
    #[error("A_f has no eigenvalues in the open right half plane")]
    NoAntiStableBlock,
    #[error("stable/anti-stable split failed: {0}")]
    SplitFailure(String),
    #[error("T - S is not positive definite (minimum eigenvalue {min_eigenvalue:e}); the sufficient condition fails")]
    TSGapNotPD { min_eigenvalue: f64 },
    #[error("Lyapunov equation failed: {0}")]
    LyapunovFailure(LinalgError),
    #[error(transparent)]
    Ni(#[from] NiError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `x' = A x + B1 w + B2 u`, `z = C1 x`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainPlant {
    pub a: RMat,
    pub b1: RMat,
    pub b2: RMat,
    pub c1: RMat,
}

impl UncertainPlant {
    pub fn new(a: RMat, b1: RMat, b2: RMat, c1: RMat) -> Result<Self, NiSynthError> {
        let n = a.nrows();
        let m = b1.ncols();
        if a.ncols() != n || b1.nrows() != n || b2.nrows() != n || c1.ncols() != n || c1.nrows() != m {
            return Err(NiSynthError::DimensionMismatch(format!(
                "A {}x{}, B1 {}x{}, B2 {}x{}, C1 {}x{}",
                a.nrows(),
                a.ncols(),
                b1.nrows(),
                b1.ncols(),
                b2.nrows(),
                b2.ncols(),
                c1.nrows(),
                c1.ncols()
            )));
        }
        if [&a, &b1, &b2, &c1].iter().any(|m| m.iter().any(|x| !x.is_finite())) {
            return Err(LinalgError::NonFinite("plant").into());
        }
        Ok(Self { a, b1, b2, c1 })
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    /// `R = C1 B1 + B1^T C1^T`.
    pub fn r(&self) -> RMat {
        let cb = &self.c1 * &self.b1;
        &cb + cb.transpose()
    }

    /// Condition number of `C1 B2` (infinite when singular or non-square).
    pub fn c1b2_condition(&self) -> f64 {
        let m = &self.c1 * &self.b2;
        if !m.is_square() || m.nrows() == 0 {
            return f64::INFINITY;
        }
        let sv = singular_values(&to_complex(&m));
        let lo = *sv.last().unwrap();
        if lo == 0.0 { f64::INFINITY } else { sv[0] / lo }
    }

    fn check(&self) -> Result<(RMat, RMat), NiSynthError> {
        let condition = self.c1b2_condition();
        if !(condition < 1e12) {
            return Err(NiSynthError::C1B2Singular { condition });
        }
        let r = self.r();
        let min_eigenvalue = hermitian_eigenvalues(&to_complex(&r))?.first().copied().unwrap_or(0.0);
        if min_eigenvalue <= 1e-9 * r.norm().max(ABS_FLOOR) {
            return Err(NiSynthError::RNotPositive { min_eigenvalue });
        }
        let c1b2_inv = real_part(&inverse(&to_complex(&(&self.c1 * &self.b2)))?);
        Ok((r, c1b2_inv))
    }
}

/// Orthogonal split `U^T A_f U = [[A11, A12], [0, A22]]` with `A22`
/// anti-stable, together with the conformally partitioned input matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurSplit {
    pub u: RMat,
    pub af: RMat,
    pub bf: RMat,
    pub b1_tilde: RMat,
    pub a11: RMat,
    pub a12: RMat,
    pub a22: RMat,
    pub bf1: RMat,
    pub bf2: RMat,
    pub b11: RMat,
    pub b22: RMat,
}

impl SchurSplit {
    /// Dimension of the closed-left-half-plane block `A11`.
    pub fn stable_dim(&self) -> usize {
        self.a11.nrows()
    }
}

/// `A - B2 (C1 B2)^-1 C1 A`.
pub fn af_matrix(plant: &UncertainPlant) -> Result<RMat, NiSynthError> {
    let (_, c1b2_inv) = plant.check()?;
    Ok(&plant.a - &plant.b2 * c1b2_inv * &plant.c1 * &plant.a)
}

/// Real orthogonal `U` whose leading `k` columns span the invariant subspace
/// of the eigenvalues with real part at most `tol * |A|`.
fn real_split_basis(af: &RMat) -> Result<(RMat, usize), NiSynthError> {
    let n = af.nrows();
    let afc = to_complex(af);
    let tol = 1e-8 * afc.norm().max(ABS_FLOOR);
    let schur = ordered_schur(&afc, |z| z.re <= tol)?;
    let k = schur.selected;
    if k == 0 || k == n || already_split(af, k, tol)? {
        return Ok((RMat::identity(n, n), k));
    }
    // The subspace is closed under conjugation, so [Re U1, Im U1] has rank k.
    let u1 = schur.u.columns(0, k).into_owned();
    let mut stacked = RMat::zeros(n, 2 * k);
    stacked.columns_mut(0, k).copy_from(&real_part(&u1));
    stacked.columns_mut(k, k).copy_from(&imag_part(&u1));
    // Eigenvectors of the Gram matrix give the subspace and its complement at once.
    let gram = &stacked * stacked.transpose();
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = eig.eigenvalues[order[0]];
    let extra = eig.eigenvalues[order[k]];
    if extra > 1e-12 * top {
        return Err(NiSynthError::SplitFailure(format!(
            "invariant subspace is not conjugation-closed (extra singular value {:e})",
            extra.sqrt()
        )));
    }
    let mut u = RMat::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        u.set_column(col, &eig.eigenvectors.column(idx));
    }
    Ok((u, k))
}

fn already_split(af: &RMat, k: usize, tol: f64) -> Result<bool, NiSynthError> {
    let n = af.nrows();
    if af.view((k, 0), (n - k, k)).iter().any(|&x| x != 0.0) {
        return Ok(false);
    }
    let lead = eigenvalues(&to_complex(&af.view((0, 0), (k, k)).into_owned()))?;
    let trail = eigenvalues(&to_complex(&af.view((k, k), (n - k, n - k)).into_owned()))?;
    Ok(lead.iter().all(|z| z.re <= tol) && trail.iter().all(|z| z.re > tol))
}

pub fn schur_split(plant: &UncertainPlant) -> Result<SchurSplit, NiSynthError> {
    let split = split_unchecked(plant)?;
    if split.a22.nrows() == 0 {
        return Err(NiSynthError::NoAntiStableBlock);
    }
    Ok(split)
}

fn split_unchecked(plant: &UncertainPlant) -> Result<SchurSplit, NiSynthError> {
    let (r, c1b2_inv) = plant.check()?;
    let n = plant.states();
    let af0 = &plant.a - &plant.b2 * &c1b2_inv * &plant.c1 * &plant.a;
    let (u, k) = real_split_basis(&af0)?;
    let af = u.transpose() * &af0 * &u;
    let r_inv = real_part(&inverse(&to_complex(&r))?);
    let bf = u.transpose() * (&plant.b2 * &c1b2_inv - &plant.b1 * r_inv);
    let b1_tilde = u.transpose() * &plant.b1;
    let m = bf.ncols();
    let lower = af.view((k, 0), (n - k, k)).norm();
    if lower > 1e-8 * af.norm().max(1.0) {
        return Err(NiSynthError::SplitFailure(format!("lower-left block has norm {lower:e}")));
    }
    Ok(SchurSplit {
        a11: af.view((0, 0), (k, k)).into_owned(),
        a12: af.view((0, k), (k, n - k)).into_owned(),
        a22: af.view((k, k), (n - k, n - k)).into_owned(),
        bf1: bf.view((0, 0), (k, m)).into_owned(),
        bf2: bf.view((k, 0), (n - k, m)).into_owned(),
        b11: b1_tilde.view((0, 0), (k, m)).into_owned(),
        b22: b1_tilde.view((k, 0), (n - k, m)).into_owned(),
        u,
        af,
        bf,
        b1_tilde,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub k: RMat,
    pub p: RMat,
    pub p_f: RMat,
    pub t: RMat,
    pub s: RMat,
    pub split: SchurSplit,
    /// `A22` was empty; `K` comes from the gain formula with `P = 0`.
    pub degenerate: bool,
    /// Smallest eigenvalue of `T - S`.
    pub gap_min_eigenvalue: f64,
    pub t_residual: f64,
    pub s_residual: f64,
    /// Residual of the Riccati equation for `P_f` and its tolerance.
    pub are_residual: f64,
    pub are_tolerance: f64,
    pub closed_loop_abscissa: f64,
    /// No closed-loop eigenvalue lies in the open right half plane.
    pub anti_stable_stabilized: bool,
    pub closed_loop_verdict: NiVerdict,
}

impl SynthesisResult {
    /// Every postcondition holds.
    pub fn verified(&self) -> bool {
        self.closed_loop_verdict.classification == NiClass::Ni
            && self.anti_stable_stabilized
            && self.are_residual <= self.are_tolerance
    }
}

/// `P_f A_f + A_f^T P_f - P_f B_f R B_f^T P_f + P_f B1~ R^-1 B1~^T P_f`.
pub fn synthesis_are_residual(split: &SchurSplit, r: &RMat, p_f: &RMat) -> Result<RMat, NiSynthError> {
    let r_inv = real_part(&inverse(&to_complex(r))?);
    Ok(p_f * &split.af + split.af.transpose() * p_f - p_f * &split.bf * r * split.bf.transpose() * p_f
        + p_f * &split.b1_tilde * r_inv * split.b1_tilde.transpose() * p_f)
}

/// `K = (C1 B2)^-1 (B1^T P - C1 A - R (B2^T C1^T)^-1 B2^T P)`.
pub fn feedback_gain(plant: &UncertainPlant, p: &RMat) -> Result<RMat, NiSynthError> {
    let (r, c1b2_inv) = plant.check()?;
    let b2t_c1t_inv = c1b2_inv.transpose();
    Ok(&c1b2_inv
        * (plant.b1.transpose() * p - &plant.c1 * &plant.a - r * b2t_c1t_inv * plant.b2.transpose() * p))
}

pub fn synthesize_ni_feedback(plant: &UncertainPlant) -> Result<SynthesisResult, NiSynthError> {
    synthesize_ni_feedback_with(plant, &FrequencyGrid::default(), &Tolerances::default())
}

pub fn synthesize_ni_feedback_with(
    plant: &UncertainPlant,
    grid: &FrequencyGrid,
    tol: &Tolerances,
) -> Result<SynthesisResult, NiSynthError> {
    let (r, _) = plant.check()?;
    let n = plant.states();
    let split = split_unchecked(plant)?;
    let k_dim = split.stable_dim();
    let q = n - k_dim;
    let r_inv = real_part(&inverse(&to_complex(&r))?);

    let (t, s, p_f, gap_min_eigenvalue, t_residual, s_residual) = if q == 0 {
        (RMat::zeros(0, 0), RMat::zeros(0, 0), RMat::zeros(n, n), f64::INFINITY, 0.0, 0.0)
    } else {
        let neg = to_complex(&(-&split.a22));
        let qt = &split.bf2 * &r * split.bf2.transpose();
        let qs = &split.b22 * &r_inv * split.b22.transpose();
        let t = real_part(&solve_lyapunov(&neg, &to_complex(&qt)).map_err(NiSynthError::LyapunovFailure)?);
        let s = real_part(&solve_lyapunov(&neg, &to_complex(&qs)).map_err(NiSynthError::LyapunovFailure)?);
        let t = (&t + t.transpose()) * 0.5;
        let s = (&s + s.transpose()) * 0.5;
        let lyap = |x: &RMat, rhs: &RMat| (-&split.a22 * x - x * split.a22.transpose() + rhs).norm();
        let t_residual = lyap(&t, &qt);
        let s_residual = lyap(&s, &qs);
        let gap = &t - &s;
        let gap_min = hermitian_eigenvalues(&to_complex(&gap))?[0];
        if gap.clone().cholesky().is_none() || gap_min <= 1e-9 * t.norm().max(ABS_FLOOR) {
            return Err(NiSynthError::TSGapNotPD { min_eigenvalue: gap_min });
        }
        let gap_inv = real_part(&inverse(&to_complex(&gap))?);
        let mut p_f = RMat::zeros(n, n);
        p_f.view_mut((k_dim, k_dim), (q, q)).copy_from(&((&gap_inv + gap_inv.transpose()) * 0.5));
        (t, s, p_f, gap_min, t_residual, s_residual)
    };

    let p = &split.u * &p_f * split.u.transpose();
    let p = (&p + p.transpose()) * 0.5;
    let k = feedback_gain(plant, &p)?;
    let are_residual = synthesis_are_residual(&split, &r, &p_f)?.norm();
    let are_tolerance = 1e-7 * p_f.norm().powi(2).max(1.0);
    let closed = close_loop(plant, &k)?;
    let closed_loop_abscissa = if n == 0 { f64::NEG_INFINITY } else { spectral_abscissa(&to_complex(&closed.a))? };
    let anti_stable_stabilized = closed_loop_abscissa <= tol.axis * closed.a.norm().max(1.0);
    let closed_loop_verdict = ni_frequency_oracle_with(&closed, grid, tol)?;
    Ok(SynthesisResult {
        k,
        p,
        p_f,
        t,
        s,
        split,
        degenerate: q == 0,
        gap_min_eigenvalue,
        t_residual,
        s_residual,
        are_residual,
        are_tolerance,
        closed_loop_abscissa,
        anti_stable_stabilized,
        closed_loop_verdict,
    })
}

/// `(A + B2 K, B1, C1, 0)`.
pub fn close_loop(plant: &UncertainPlant, k: &RMat) -> Result<RealStateSpace, NiSynthError> {
    if k.nrows() != plant.b2.ncols() || k.ncols() != plant.states() {
        return Err(NiSynthError::DimensionMismatch(format!(
            "K is {}x{}, expected {}x{}",
            k.nrows(),
            k.ncols(),
            plant.b2.ncols(),
            plant.states()
        )));
    }
    Ok(RealStateSpace::strictly_proper(
        &plant.a + &plant.b2 * k,
        plant.b1.clone(),
        plant.c1.clone(),
    )?)
}
