//! Coherent quantum H-infinity synthesis: assumption checks, the coupled
//! Riccati pair, the central controller and closed-loop verification.

mod zeros;

use num_complex::Complex64;
use thiserror::Error;

pub use zeros::invariant_zeros;

use crate::numlin::{
    block2, hinf_norm_with, inverse, min_hermitian_eigenvalue, scaled, spectral_abscissa,
    spectral_radius, solve_are, vstack, hstack, CMat, RMat, ComplexStateSpace, HinfNorm, LinalgError, Tolerances,
};
use crate::qlin::{
    is_doubled_up, physreal_are_test_with, quadrature_basis, PhysRealResult, QlinError, SkewAreOptions,
};

pub const STRUCTURE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
pub const AXIS_ZERO_TOL: f64 = 1e-8;
pub const ARE_TOL: f64 = 1e-8;
pub const COUPLING_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HinfError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("plant matrix {0} is not in doubled-up form")]
    StructureViolated(String),
    #[error("no stabilizing positive semidefinite X: {0}")]
    NoStabilizingX(String),
    #[error("no stabilizing positive semidefinite Y: {0}")]
    NoStabilizingY(String),
    #[error("coupling condition violated: spectral radius of XY is {rho}")]
    CouplingViolated { rho: f64 },
    #[error("controller is not in doubled-up form, so it has no real quadrature form")]
    ControllerNotDoubled,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Qlin(#[from] QlinError),
}

/// Plant with state `(a, a#)`, inputs `(v, w, u)` and outputs `(z, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPlant {
    pub f: CMat,
    pub g0: CMat,
    pub g1: CMat,
    pub g2: CMat,
    pub h1: CMat,
    pub h2: CMat,
    pub k12: CMat,
    pub k20: CMat,
    pub k21: CMat,
}

impl QuantumPlant {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: CMat,
        g0: CMat,
        g1: CMat,
        g2: CMat,
        h1: CMat,
        h2: CMat,
        k12: CMat,
        k20: CMat,
        k21: CMat,
    ) -> Result<Self, HinfError> {
        let plant = Self { f, g0, g1, g2, h1, h2, k12, k20, k21 };
        plant.check_dims()?;
        for (name, m) in plant.named() {
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(LinalgError::NonFinite("quantum plant").into());
            }
            if !is_doubled_up(m, STRUCTURE_TOL) {
                return Err(HinfError::StructureViolated(name.into()));
            }
        }
        Ok(plant)
    }

    pub fn named(&self) -> [(&'static str, &CMat); 9] {
        [
            ("F", &self.f),
            ("G0", &self.g0),
            ("G1", &self.g1),
            ("G2", &self.g2),
            ("H1", &self.h1),
            ("H2", &self.h2),
            ("K12", &self.k12),
            ("K20", &self.k20),
            ("K21", &self.k21),
        ]
    }

    pub fn states(&self) -> usize {
        self.f.nrows()
    }

    fn check_dims(&self) -> Result<(), HinfError> {
        let n = self.f.nrows();
        let (nv, nw, nu) = (self.g0.ncols(), self.g1.ncols(), self.g2.ncols());
        let (nz, ny) = (self.h1.nrows(), self.h2.nrows());
        let expected = [
            ("F", &self.f, (n, n)),
            ("G0", &self.g0, (n, nv)),
            ("G1", &self.g1, (n, nw)),
            ("G2", &self.g2, (n, nu)),
            ("H1", &self.h1, (nz, n)),
            ("H2", &self.h2, (ny, n)),
            ("K12", &self.k12, (nz, nu)),
            ("K20", &self.k20, (ny, nv)),
            ("K21", &self.k21, (ny, nw)),
        ];
        for (name, m, shape) in expected {
            if m.shape() != shape {
                return Err(HinfError::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(())
    }

    pub fn e1(&self) -> CMat {
        self.k12.adjoint() * &self.k12
    }

    pub fn e2(&self) -> CMat {
        &self.k21 * self.k21.adjoint()
    }

    /// Plant whose disturbance channel is divided by `gamma`, so that a
    /// closed-loop bound of 1 for it is a bound of `gamma` for `self`.
    pub fn scaled(&self, gamma: f64) -> Self {
        let k = Complex64::new(1.0 / gamma, 0.0);
        Self { g1: &self.g1 * k, k21: &self.k21 * k, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub e1_min_eigenvalue: f64,
    pub e1_positive: bool,
    pub e2_min_eigenvalue: f64,
    pub e2_positive: bool,
    /// Invariant zeros of `(F, G2, H1, K12)`.
    pub control_zeros: Vec<Complex64>,
    /// Frequency of a zero on the imaginary axis, if any.
    pub control_axis_witness: Option<f64>,
    /// Invariant zeros of `(F, G1, H2, K21)`.
    pub filter_zeros: Vec<Complex64>,
    pub filter_axis_witness: Option<f64>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.e1_positive && self.e2_positive && self.control_axis_witness.is_none() && self.filter_axis_witness.is_none()
    }
}

fn min_eig(m: &CMat) -> Result<f64, LinalgError> {
    if m.nrows() == 0 {
        return Ok(f64::INFINITY);
    }
    min_hermitian_eigenvalue(m)
}

fn axis_witness(zeros: &[Complex64], scale: f64) -> Option<f64> {
    let tol = scaled(AXIS_ZERO_TOL, scale);
    zeros.iter().filter(|z| z.re.abs() <= tol).map(|z| z.im).min_by(|a, b| a.abs().total_cmp(&b.abs()))
}

pub fn check_assumptions(plant: &QuantumPlant) -> Result<AssumptionReport, HinfError> {
    let (e1, e2) = (plant.e1(), plant.e2());
    let e1_min = min_eig(&e1)?;
    let e2_min = min_eig(&e2)?;
    let e1_positive = e1.nrows() > 0 && e1_min > scaled(PSD_TOL, e1.norm());
    let e2_positive = e2.nrows() > 0 && e2_min > scaled(PSD_TOL, e2.norm());
    let (control_zeros, filter_zeros) = if e1_positive && e2_positive {
        let control = invariant_zeros(&plant.f, &plant.g2, &plant.h1, &plant.k12)?;
        // The filter pencil is the adjoint of a control pencil.
        let filter = invariant_zeros(&plant.f.adjoint(), &plant.h2.adjoint(), &plant.g1.adjoint(), &plant.k21.adjoint())?
            .into_iter()
            .map(|z| z.conj())
            .collect();
        (control, filter)
    } else {
        (vec![], vec![])
    };
    let scale = plant.f.norm();
    Ok(AssumptionReport {
        e1_min_eigenvalue: e1_min,
        e1_positive,
        e2_min_eigenvalue: e2_min,
        e2_positive,
        control_axis_witness: axis_witness(&control_zeros, scale),
        control_zeros,
        filter_axis_witness: axis_witness(&filter_zeros, scale),
        filter_zeros,
    })
}

#[derive(Debug, Clone)]
pub struct RiccatiPair {
    pub x: CMat,
    pub y: CMat,
    /// Residuals relative to `max(1, |constant term|)`.
    pub x_residual: f64,
    pub y_residual: f64,
    /// Largest real part of `F_X + (G1 G1^H - G2 E1^-1 G2^H) X`.
    pub x_abscissa: f64,
    /// Largest real part of `F_Y + Y (H1^H H1 - H2^H E2^-1 H2)`.
    pub y_abscissa: f64,
    pub x_min_eigenvalue: f64,
    pub y_min_eigenvalue: f64,
}

/// Coefficients `(A, G, Q)` of the X equation written as `A^H X + X A - X G X + Q = 0`.
fn x_coefficients(p: &QuantumPlant, e1_inv: &CMat) -> (CMat, CMat, CMat) {
    let a = &p.f - &p.g2 * e1_inv * p.k12.adjoint() * &p.h1;
    let g = &p.g2 * e1_inv * p.g2.adjoint() - &p.g1 * p.g1.adjoint();
    let nz = p.k12.nrows();
    let q = p.h1.adjoint() * (CMat::identity(nz, nz) - &p.k12 * e1_inv * p.k12.adjoint()) * &p.h1;
    (a, g, q)
}

/// Coefficients of the Y equation, transposed into the same form.
fn y_coefficients(p: &QuantumPlant, e2_inv: &CMat) -> (CMat, CMat, CMat) {
    let a = (&p.f - &p.g1 * p.k21.adjoint() * e2_inv * &p.h2).adjoint();
    let g = p.h2.adjoint() * e2_inv * &p.h2 - p.h1.adjoint() * &p.h1;
    let nw = p.k21.ncols();
    let q = &p.g1 * (CMat::identity(nw, nw) - p.k21.adjoint() * e2_inv * &p.k21) * p.g1.adjoint();
    (a, g, q)
}

fn solve_one(a: &CMat, g: &CMat, q: &CMat) -> Result<(CMat, f64, f64, f64), String> {
    // With no constant term and a Hurwitz A the stabilizing solution is 0.
    if q.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        let abscissa = spectral_abscissa(a).map_err(|e| e.to_string())?;
        if abscissa < -scaled(Tolerances::default().axis, a.norm()) {
            return Ok((CMat::zeros(a.nrows(), a.ncols()), 0.0, abscissa, 0.0));
        }
    }
    let sol = solve_are(a, g, q).map_err(|e| e.to_string())?;
    if sol.relative_residual > ARE_TOL {
        return Err(format!("residual {:e} exceeds {ARE_TOL:e}", sol.relative_residual));
    }
    let min = min_eig(&sol.x).map_err(|e| e.to_string())?;
    if min < -scaled(PSD_TOL, sol.x.norm().max(1.0)) {
        return Err(format!("stabilizing solution is indefinite (minimum eigenvalue {min:e})"));
    }
    Ok((sol.x, sol.relative_residual, sol.closed_loop_abscissa, min))
}

pub fn solve_hinf_riccatis(plant: &QuantumPlant) -> Result<RiccatiPair, HinfError> {
    let e1_inv = inverse(&plant.e1())?;
    let e2_inv = inverse(&plant.e2())?;
    let (ax, gx, qx) = x_coefficients(plant, &e1_inv);
    let (x, x_residual, x_abscissa, x_min) = solve_one(&ax, &gx, &qx).map_err(HinfError::NoStabilizingX)?;
    let (ay, gy, qy) = y_coefficients(plant, &e2_inv);
    let (y, y_residual, y_abscissa, y_min) = solve_one(&ay, &gy, &qy).map_err(HinfError::NoStabilizingY)?;
    Ok(RiccatiPair { x, y, x_residual, y_residual, x_abscissa, y_abscissa, x_min_eigenvalue: x_min, y_min_eigenvalue: y_min })
}

/// Residuals of the two equations in their original form.
pub fn riccati_residuals(plant: &QuantumPlant, x: &CMat, y: &CMat) -> Result<(CMat, CMat), HinfError> {
    let e1_inv = inverse(&plant.e1())?;
    let e2_inv = inverse(&plant.e2())?;
    let fx = &plant.f - &plant.g2 * &e1_inv * plant.k12.adjoint() * &plant.h1;
    let nz = plant.k12.nrows();
    let rx = fx.adjoint() * x
        + x * &fx
        + x * (&plant.g1 * plant.g1.adjoint() - &plant.g2 * &e1_inv * plant.g2.adjoint()) * x
        + plant.h1.adjoint() * (CMat::identity(nz, nz) - &plant.k12 * &e1_inv * plant.k12.adjoint()) * &plant.h1;
    let fy = &plant.f - &plant.g1 * plant.k21.adjoint() * &e2_inv * &plant.h2;
    let nw = plant.k21.ncols();
    let ry = &fy * y
        + y * fy.adjoint()
        + y * (plant.h1.adjoint() * &plant.h1 - plant.h2.adjoint() * &e2_inv * &plant.h2) * y
        + &plant.g1 * (CMat::identity(nw, nw) - plant.k21.adjoint() * &e2_inv * &plant.k21) * plant.g1.adjoint();
    Ok((rx, ry))
}

pub fn spectral_radius_xy(x: &CMat, y: &CMat) -> Result<f64, HinfError> {
    if x.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(spectral_radius(&(x * y))?)
}

/// `rho(XY) < 1 - 1e-9`.
pub fn coupling_check(x: &CMat, y: &CMat) -> Result<bool, HinfError> {
    Ok(spectral_radius_xy(x, y)? < 1.0 - COUPLING_MARGIN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HinfController {
    pub fc: CMat,
    pub gc: CMat,
    pub hc: CMat,
    pub x: CMat,
    pub y: CMat,
    pub rho_xy: f64,
}

/// Central controller, evaluated in the order `Hc`, `Gc`, `Fc`.
pub fn synthesize_controller(plant: &QuantumPlant, x: &CMat, y: &CMat) -> Result<HinfController, HinfError> {
    let n = plant.states();
    if x.shape() != (n, n) || y.shape() != (n, n) {
        return Err(HinfError::DimensionMismatch(format!("X and Y must be {n}x{n}")));
    }
    let rho = spectral_radius_xy(x, y)?;
    if rho >= 1.0 - COUPLING_MARGIN {
        return Err(HinfError::CouplingViolated { rho });
    }
    let e1_inv = inverse(&plant.e1())?;
    let e2_inv = inverse(&plant.e2())?;
    let hc = -(&e1_inv * (plant.g2.adjoint() * x + plant.k12.adjoint() * &plant.h1));
    let i_yx = CMat::identity(n, n) - y * x;
    let gc = inverse(&i_yx)? * (y * plant.h2.adjoint() + &plant.g1 * plant.k21.adjoint()) * &e2_inv;
    let fc = &plant.f + &plant.g2 * &hc - &gc * &plant.h2 + (&plant.g1 - &gc * &plant.k21) * plant.g1.adjoint() * x;
    Ok(HinfController { fc, gc, hc, x: x.clone(), y: y.clone(), rho_xy: rho })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    pub fcl: CMat,
    pub gcl: CMat,
    pub hcl: CMat,
}

impl ClosedLoop {
    pub fn transfer(&self) -> Result<ComplexStateSpace, LinalgError> {
        ComplexStateSpace::strictly_proper(self.fcl.clone(), self.gcl.clone(), self.hcl.clone())
    }
}

/// Whether each controller matrix kept the doubled-up form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    pub fc: bool,
    pub gc: bool,
    pub hc: bool,
}

impl StructureReport {
    pub fn all(&self) -> bool {
        self.fc && self.gc && self.hc
    }
}

pub fn controller_structure(ctrl: &HinfController) -> StructureReport {
    let tol = 1e-8;
    StructureReport { fc: is_doubled_up(&ctrl.fc, tol), gc: is_doubled_up(&ctrl.gc, tol), hc: is_doubled_up(&ctrl.hc, tol) }
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub closed_loop: ClosedLoop,
    pub abscissa: f64,
    pub hurwitz: bool,
    /// Absent when `Fcl` is not Hurwitz.
    pub norm: Option<HinfNorm>,
    pub norm_below_one: bool,
    pub verified: bool,
    pub structure: StructureReport,
}

pub fn assemble(plant: &QuantumPlant, ctrl: &HinfController) -> Result<ClosedLoop, HinfError> {
    let n = plant.states();
    let nc = ctrl.fc.nrows();
    let shapes = [
        (ctrl.fc.shape(), (nc, nc)),
        (ctrl.gc.shape(), (nc, plant.h2.nrows())),
        (ctrl.hc.shape(), (plant.g2.ncols(), nc)),
    ];
    if shapes.iter().any(|(got, want)| got != want) {
        return Err(HinfError::DimensionMismatch(format!(
            "controller Fc {:?}, Gc {:?}, Hc {:?} does not fit a plant with {n} states",
            ctrl.fc.shape(),
            ctrl.gc.shape(),
            ctrl.hc.shape()
        )));
    }
    Ok(ClosedLoop {
        fcl: block2(&plant.f, &(&plant.g2 * &ctrl.hc), &(&ctrl.gc * &plant.h2), &ctrl.fc),
        gcl: vstack(&plant.g1, &(&ctrl.gc * &plant.k21)),
        hcl: hstack(&plant.h1, &(&plant.k12 * &ctrl.hc)),
    })
}

pub fn assemble_and_verify(plant: &QuantumPlant, ctrl: &HinfController) -> Result<Verification, HinfError> {
    assemble_and_verify_with(plant, ctrl, &Tolerances::default())
}

pub fn assemble_and_verify_with(
    plant: &QuantumPlant,
    ctrl: &HinfController,
    tol: &Tolerances,
) -> Result<Verification, HinfError> {
    let closed_loop = assemble(plant, ctrl)?;
    let abscissa = spectral_abscissa(&closed_loop.fcl)?;
    let hurwitz = abscissa < -scaled(tol.axis, closed_loop.fcl.norm());
    let norm = if hurwitz { Some(hinf_norm_with(&closed_loop.transfer()?, tol)?) } else { None };
    let norm_below_one = norm.is_some_and(|h| h.value < 1.0);
    Ok(Verification {
        structure: controller_structure(ctrl),
        closed_loop,
        abscissa,
        hurwitz,
        norm,
        norm_below_one,
        verified: hurwitz && norm_below_one,
    })
}

/// Every stage of a synthesis run.
#[derive(Debug, Clone)]
pub struct HinfDesign {
    pub gamma: f64,
    pub assumptions: AssumptionReport,
    pub riccatis: RiccatiPair,
    pub controller: HinfController,
    pub verification: Verification,
}

/// Runs the whole pipeline for the bound `gamma` (1 for the unscaled problem).
/// Assumption failures are returned as part of the error chain only when a
/// later stage cannot proceed.
pub fn synthesize_hinf(plant: &QuantumPlant, gamma: f64) -> Result<HinfDesign, HinfError> {
    let scaled_plant = if gamma == 1.0 { plant.clone() } else { plant.scaled(gamma) };
    let assumptions = check_assumptions(&scaled_plant)?;
    let riccatis = solve_hinf_riccatis(&scaled_plant)?;
    let controller = synthesize_controller(&scaled_plant, &riccatis.x, &riccatis.y)?;
    let verification = assemble_and_verify(&scaled_plant, &controller)?;
    Ok(HinfDesign { gamma, assumptions, riccatis, controller, verification })
}

/// Real quadrature form `(A, B, C)` of a doubled-up controller.
pub fn controller_quadrature(ctrl: &HinfController) -> Result<(RMat, RMat, RMat), HinfError> {
    let s = controller_structure(ctrl);
    if !s.all() {
        return Err(HinfError::ControllerNotDoubled);
    }
    let (n, ny, nu) = (ctrl.fc.nrows() / 2, ctrl.gc.ncols() / 2, ctrl.hc.nrows() / 2);
    let basis = |k: usize| quadrature_basis(k);
    let inv = |k: usize| quadrature_basis(k).adjoint() * Complex64::new(0.5, 0.0);
    let re = |m: CMat| m.map(|z| z.re);
    Ok((
        re(basis(n) * &ctrl.fc * inv(n)),
        re(basis(n) * &ctrl.gc * inv(ny)),
        re(basis(nu) * &ctrl.hc * inv(n)),
    ))
}

/// Hands the controller to the skew-symmetric Riccati realizability test.
pub fn realize_controller(ctrl: &HinfController, opts: &SkewAreOptions) -> Result<PhysRealResult, HinfError> {
    let (a, b, c) = controller_quadrature(ctrl)?;
    Ok(physreal_are_test_with(&a, &b, &c, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::doubled;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn m(r: usize, cols: usize, data: &[f64]) -> CMat {
        CMat::from_row_slice(r, cols, &data.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    /// One mode with a diagonal real doubled-up form, so that the X
    /// equation is the scalar quadratic `2 f x + (g1^2 - g2^2 / k^2) x^2 + h^2 = 0`.
    fn scalar_plant(f: f64, g1: f64, g2: f64, h: f64, k: f64) -> QuantumPlant {
        let z = CMat::zeros(1, 1);
        let s = |v: f64| doubled(&m(1, 1, &[v]), &z);
        let zero2 = |rows: usize, cols: usize| doubled(&CMat::zeros(rows, cols), &CMat::zeros(rows, cols));
        QuantumPlant::new(
            s(f),
            zero2(1, 1),
            s(g1),
            s(g2),
            doubled(&m(2, 1, &[h, 0.0]), &CMat::zeros(2, 1)),
            s(1.0),
            doubled(&m(2, 1, &[0.0, k]), &CMat::zeros(2, 1)),
            zero2(1, 1),
            s(1.0),
        )
        .unwrap()
    }

    #[test]
    fn scalar_x_is_the_stabilizing_root() {
        let (f, g1, g2, h, k) = (-1.0, 0.5, 1.0, 1.0, 1.0);
        let plant = scalar_plant(f, g1, g2, h, k);
        let pair = solve_hinf_riccatis(&plant).unwrap();
        let qa = g1 * g1 - g2 * g2 / (k * k);
        // Roots of qa x^2 + 2 f x + h^2 = 0; the stabilizing one makes f + qa x < 0.
        let disc = (4.0 * f * f - 4.0 * qa * h * h).sqrt();
        let root = [(-2.0 * f + disc) / (2.0 * qa), (-2.0 * f - disc) / (2.0 * qa)]
            .into_iter()
            .find(|x| f + qa * x < 0.0)
            .unwrap();
        assert!((pair.x[(0, 0)].re - root).abs() < 1e-12, "{} vs {root}", pair.x[(0, 0)]);
        assert!((pair.x[(1, 1)].re - root).abs() < 1e-12);
        let (rx, ry) = riccati_residuals(&plant, &pair.x, &pair.y).unwrap();
        assert!(rx.norm() < 1e-12 && ry.norm() < 1e-12);
    }

    #[test]
    fn zero_h1_gives_zero_x() {
        let mut plant = scalar_plant(-1.0, 0.5, 1.0, 0.0, 1.0);
        plant.h1 = CMat::zeros(4, 2);
        let pair = solve_hinf_riccatis(&plant).unwrap();
        assert_eq!(pair.x, CMat::zeros(2, 2));
    }

    #[test]
    fn zero_g1_gives_zero_y() {
        let mut plant = scalar_plant(-1.0, 0.0, 1.0, 1.0, 1.0);
        plant.g1 = CMat::zeros(2, 2);
        let pair = solve_hinf_riccatis(&plant).unwrap();
        assert_eq!(pair.y, CMat::zeros(2, 2));
    }

    #[test]
    fn coupling_examples() {
        let i = CMat::identity(3, 3);
        assert!(coupling_check(&CMat::zeros(3, 3), &(&i * c(7.0))).unwrap());
        assert!(!coupling_check(&i, &i).unwrap());
        assert!(coupling_check(&(&i * c(0.5)), &i).unwrap());
    }

    #[test]
    fn zero_riccati_solutions_collapse_the_controller() {
        let plant = scalar_plant(-1.0, 0.5, 1.0, 1.0, 1.0);
        let z = CMat::zeros(2, 2);
        let ctrl = synthesize_controller(&plant, &z, &z).unwrap();
        let e1_inv = inverse(&plant.e1()).unwrap();
        let e2_inv = inverse(&plant.e2()).unwrap();
        let hc = -(&e1_inv * plant.k12.adjoint() * &plant.h1);
        let gc = &plant.g1 * plant.k21.adjoint() * &e2_inv;
        let fc = &plant.f + &plant.g2 * &hc - &gc * &plant.h2;
        assert!((&ctrl.hc - hc).norm() < 1e-15);
        assert!((&ctrl.gc - gc).norm() < 1e-15);
        assert!((&ctrl.fc - fc).norm() < 1e-15);
    }

    #[test]
    fn no_output_measurement_gain() {
        let mut plant = scalar_plant(-1.0, 0.5, 1.0, 1.0, 1.0);
        plant.h2 = CMat::zeros(2, 2);
        let x = &CMat::identity(2, 2) * c(0.3);
        let y = &CMat::identity(2, 2) * c(0.5);
        let ctrl = synthesize_controller(&plant, &x, &y).unwrap();
        let expected = (CMat::identity(2, 2) - &y * &x).try_inverse().unwrap() * &plant.g1 * inverse(&plant.e2()).unwrap();
        assert!((&ctrl.gc - expected).norm() < 1e-14);
    }

    #[test]
    fn coupled_solutions_are_rejected() {
        let plant = scalar_plant(-1.0, 0.5, 1.0, 1.0, 1.0);
        let i = CMat::identity(2, 2);
        assert!(matches!(synthesize_controller(&plant, &i, &i), Err(HinfError::CouplingViolated { .. })));
    }

    #[test]
    fn zero_controller_keeps_a_small_open_loop() {
        let plant = scalar_plant(-1.0, 0.5, 1.0, 1.0, 1.0);
        let z2 = CMat::zeros(2, 2);
        let ctrl = HinfController { fc: &CMat::identity(2, 2) * c(-1.0), gc: z2.clone(), hc: z2.clone(), x: z2.clone(), y: z2, rho_xy: 0.0 };
        // |H1 (s - f)^-1 G1| peaks at h g1 / |f| = 0.5.
        let v = assemble_and_verify(&plant, &ctrl).unwrap();
        assert!(v.verified);
        assert!((v.norm.unwrap().value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn unstable_decoupled_controller_fails() {
        let plant = scalar_plant(-1.0, 0.5, 1.0, 1.0, 1.0);
        let z2 = CMat::zeros(2, 2);
        let ctrl = HinfController { fc: CMat::identity(2, 2), gc: z2.clone(), hc: z2.clone(), x: z2.clone(), y: z2, rho_xy: 0.0 };
        let v = assemble_and_verify(&plant, &ctrl).unwrap();
        assert!(!v.hurwitz && !v.verified);
        assert!((v.abscissa - 1.0).abs() < 1e-12);
    }

    #[test]
    fn origin_zero_is_reported() {
        // F = 0 and H1 in the range of K12: the mode is invisible in z at s = 0.
        let mut plant = scalar_plant(0.0, 0.5, 0.0, 0.0, 1.0);
        plant.h1 = doubled(&m(2, 1, &[0.0, 1.0]), &CMat::zeros(2, 1));
        let report = check_assumptions(&plant).unwrap();
        assert!(report.e1_positive && report.e2_positive);
        assert_eq!(report.control_axis_witness, Some(0.0));
        assert!(!report.all_pass());
    }

    #[test]
    fn scalar_pipeline_verifies() {
        let plant = scalar_plant(-1.0, 0.5, 1.0, 1.0, 1.0);
        let design = synthesize_hinf(&plant, 1.0).unwrap();
        assert!(design.assumptions.all_pass());
        assert!(design.verification.verified);
        assert!(design.verification.structure.all());
    }

    #[test]
    fn structure_violation_rejected() {
        let mut f = CMat::zeros(2, 2);
        f[(0, 0)] = c(1.0);
        let z = CMat::zeros(2, 2);
        let err = QuantumPlant::new(f, z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z);
        assert_eq!(err, Err(HinfError::StructureViolated("F".into())));
    }
}
