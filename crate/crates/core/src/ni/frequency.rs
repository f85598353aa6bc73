//! Frequency-domain NI and SNI tests.

use num_complex::Complex64;

use super::poles::{laurent, pole_clusters};
use super::{
    FrequencyGrid, GridDiagnostics, NiClass, NiError, NiVerdict, PoleKind, RealStateSpace,
    ResidueReport, Witness,
};
use crate::numlin::{
    hermitian_part, min_hermitian_eigenvalue, scaled, transfer_eval, CMat, ComplexStateSpace, LinalgError,
    Tolerances, ABS_FLOOR,
};

/// Relative size below which a Laurent coefficient counts as zero.
const LAURENT_TOL: f64 = 1e-7;
/// Residue matrices with larger relative asymmetry are not Hermitian.
const RESIDUE_ASYMMETRY_TOL: f64 = 1e-7;
const REFINE_FACTOR: usize = 4;

struct Sample {
    omega: f64,
    min_eigenvalue: f64,
    threshold: f64,
}

fn j_difference(m: &CMat) -> CMat {
    let diff = m - m.adjoint();
    diff * Complex64::new(0.0, 1.0)
}

fn sample(sys: &ComplexStateSpace, omega: f64, tol: f64) -> Result<Option<Sample>, NiError> {
    let m = match transfer_eval(sys, Complex64::new(0.0, omega)) {
        Ok(m) => m,
        Err(LinalgError::PoleAtS { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    Ok(Some(Sample {
        omega,
        min_eigenvalue: min_hermitian_eigenvalue(&j_difference(&m))?,
        threshold: tol * m.norm().max(ABS_FLOOR),
    }))
}

/// Evaluates the minimum eigenvalue of `j(M - M^H)` on the grid, adding
/// `REFINE_FACTOR - 1` extra points on each side of any sample that is
/// within ten thresholds of zero.
fn scan(sys: &ComplexStateSpace, grid: &FrequencyGrid, tol: f64) -> Result<(Vec<Sample>, GridDiagnostics), NiError> {
    let pts = grid.points();
    let mut samples = Vec::with_capacity(pts.len());
    let mut near_zero = Vec::new();
    let mut skipped = 0;
    for (i, &w) in pts.iter().enumerate() {
        match sample(sys, w, tol)? {
            Some(s) => {
                if s.min_eigenvalue.abs() <= 10.0 * s.threshold {
                    near_zero.push(i);
                }
                samples.push(s);
            }
            None => skipped += 1,
        }
    }
    let mut refined = 0;
    let mut extra = Vec::new();
    for i in near_zero {
        let neighbours = [i.checked_sub(1), (i + 1 < pts.len()).then_some(i + 1)];
        for j in neighbours.into_iter().flatten() {
            let (a, b) = (pts[i.min(j)].ln(), pts[i.max(j)].ln());
            for k in 1..REFINE_FACTOR {
                extra.push((a + (b - a) * k as f64 / REFINE_FACTOR as f64).exp());
            }
        }
    }
    extra.sort_by(f64::total_cmp);
    extra.dedup();
    for w in extra {
        match sample(sys, w, tol)? {
            Some(s) => {
                refined += 1;
                samples.push(s);
            }
            None => skipped += 1,
        }
    }
    let (min_eigenvalue, argmin) = samples
        .iter()
        .map(|s| (s.min_eigenvalue, s.omega))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)))
        .unwrap_or((f64::INFINITY, f64::NAN));
    let diag = GridDiagnostics {
        lo: grid.lo(),
        hi: grid.hi(),
        base_points: pts.len(),
        refined_points: refined,
        skipped,
        min_eigenvalue,
        argmin,
    };
    Ok((samples, diag))
}

fn feedthrough_asymmetry(sys: &RealStateSpace) -> f64 {
    (&sys.d - sys.d.transpose()).norm() / sys.d.norm().max(ABS_FLOOR)
}

fn residue_report(pole: Complex64, kind: PoleKind, order: usize, residue: CMat, tol: f64) -> Result<ResidueReport, NiError> {
    let norm = residue.norm();
    let asymmetry = if norm == 0.0 { 0.0 } else { (&residue - residue.adjoint()).norm() / norm };
    let min_eigenvalue = min_hermitian_eigenvalue(&hermitian_part(&residue))?;
    let psd = asymmetry <= RESIDUE_ASYMMETRY_TOL && min_eigenvalue >= -tol * norm.max(ABS_FLOOR);
    Ok(ResidueReport {
        pole,
        kind,
        order,
        residue,
        psd,
        asymmetry,
        min_eigenvalue,
    })
}

/// Poles of the transfer function (not merely eigenvalues of `A`) sorted by
/// region, plus the residue data of the imaginary-axis ones.
struct PoleScan {
    unstable: Vec<Complex64>,
    axis: Vec<Complex64>,
    residues: Vec<ResidueReport>,
    warnings: Vec<String>,
}

fn scan_poles(sys: &RealStateSpace, tol: &Tolerances, check_axis: bool) -> Result<PoleScan, NiError> {
    let cs = sys.to_complex();
    let scale = cs.a.norm().max(ABS_FLOOR);
    let axis_tol = scaled(tol.axis, scale);
    let mut out = PoleScan {
        unstable: Vec::new(),
        axis: Vec::new(),
        residues: Vec::new(),
        warnings: Vec::new(),
    };
    for cluster in pole_clusters(&cs.a)? {
        let z = cluster.centroid;
        if z.re < -axis_tol {
            continue;
        }
        let on_axis = z.re <= axis_tol;
        let origin = on_axis && z.im.abs() <= axis_tol;
        let center = if origin {
            Complex64::new(0.0, 0.0)
        } else if on_axis {
            Complex64::new(0.0, z.im)
        } else {
            z
        };
        let lt = laurent(&cs.a, &cs.b, &cs.c, &cluster, center)?;
        let order = lt.order(LAURENT_TOL);
        if order == 0 {
            out.warnings.push(format!(
                "eigenvalue {center} of A is not a pole of the transfer function (cancelled mode)"
            ));
            continue;
        }
        if !on_axis {
            out.unstable.push(z);
            continue;
        }
        out.axis.push(center);
        if !check_axis || (!origin && center.im < 0.0) {
            continue;
        }
        if origin {
            if order > 2 {
                return Err(NiError::OriginPoleOrderTooHigh { order });
            }
            let limit = if order == 2 {
                lt.coefficients[1].clone()
            } else {
                CMat::zeros(sys.ports(), sys.ports())
            };
            out.residues.push(residue_report(center, PoleKind::Origin, order, limit, tol.predicate)?);
        } else {
            if order > 1 {
                return Err(NiError::NonSimplePoleOnAxis { pole: center, order });
            }
            let k = &lt.coefficients[0] * Complex64::new(0.0, 1.0);
            out.residues.push(residue_report(center, PoleKind::Axis, order, k, tol.predicate)?);
        }
    }
    Ok(out)
}

pub fn ni_frequency_oracle(sys: &RealStateSpace, grid: &FrequencyGrid) -> Result<NiVerdict, NiError> {
    ni_frequency_oracle_with(sys, grid, &Tolerances::default())
}

/// Checks the four conditions of the NI definition: no open right-half-plane
/// poles, `j(M(jw) - M(jw)^H) >= 0` on the grid, simple axis poles with
/// Hermitian PSD residues, and at most a double pole at the origin with
/// Hermitian PSD `lim s^2 M(s)`.
pub fn ni_frequency_oracle_with(
    sys: &RealStateSpace,
    grid: &FrequencyGrid,
    tol: &Tolerances,
) -> Result<NiVerdict, NiError> {
    if grid.points().is_empty() {
        return Err(NiError::GridEmpty);
    }
    let asymmetry = feedthrough_asymmetry(sys);
    if asymmetry > tol.predicate {
        let mut v = NiVerdict::new(NiClass::NotNi);
        v.witness = Some(Witness::Feedthrough { asymmetry });
        return Ok(v);
    }

    let poles = scan_poles(sys, tol, true)?;
    let mut v = NiVerdict::new(NiClass::Ni);
    v.warnings = poles.warnings;
    v.residues = poles.residues;
    if let Some(&p) = poles.unstable.first() {
        v.classification = NiClass::NotNi;
        v.witness = Some(Witness::Pole(p));
        return Ok(v);
    }
    if let Some(r) = v.residues.iter().find(|r| !r.psd) {
        v.classification = NiClass::NotNi;
        v.witness = Some(Witness::Residue {
            pole: r.pole,
            min_eigenvalue: r.min_eigenvalue,
            asymmetry: r.asymmetry,
        });
    }

    let (samples, diag) = scan(&sys.to_complex(), grid, tol.predicate)?;
    let worst = samples
        .iter()
        .filter(|s| s.min_eigenvalue < -s.threshold)
        .min_by(|x, y| (x.min_eigenvalue / x.threshold).total_cmp(&(y.min_eigenvalue / y.threshold)));
    if let (Some(s), None) = (worst, &v.witness) {
        v.classification = NiClass::NotNi;
        v.witness = Some(Witness::Frequency {
            omega: s.omega,
            min_eigenvalue: s.min_eigenvalue,
        });
    }
    if v.classification == NiClass::Ni {
        v.warnings.push(format!(
            "condition j(M - M^H) >= 0 verified on {} frequencies in [{:e}, {:e}] rad/s only",
            diag.base_points + diag.refined_points - diag.skipped,
            diag.lo,
            diag.hi
        ));
    }
    v.grid = Some(diag);
    Ok(v)
}

pub fn sni_check(sys: &RealStateSpace, grid: &FrequencyGrid) -> Result<NiVerdict, NiError> {
    sni_check_with(sys, grid, &Tolerances::default())
}

/// SNI test: no poles in the closed right half plane and
/// `j(N(jw) - N(jw)^H) > 0` at every grid frequency.
pub fn sni_check_with(sys: &RealStateSpace, grid: &FrequencyGrid, tol: &Tolerances) -> Result<NiVerdict, NiError> {
    if grid.points().is_empty() {
        return Err(NiError::GridEmpty);
    }
    let asymmetry = feedthrough_asymmetry(sys);
    if asymmetry > tol.predicate {
        let mut v = NiVerdict::new(NiClass::NotNi);
        v.witness = Some(Witness::Feedthrough { asymmetry });
        return Ok(v);
    }
    let poles = scan_poles(sys, tol, false)?;
    let mut v = NiVerdict::new(NiClass::Sni);
    v.warnings = poles.warnings;
    if let Some(&p) = poles.unstable.first() {
        v.classification = NiClass::NotNi;
        v.witness = Some(Witness::Pole(p));
        return Ok(v);
    }
    if let Some(&p) = poles.axis.first() {
        v.classification = NiClass::NotSni;
        v.witness = Some(Witness::Pole(p));
        return Ok(v);
    }
    let (samples, diag) = scan(&sys.to_complex(), grid, tol.predicate)?;
    let worst = samples
        .iter()
        .min_by(|x, y| (x.min_eigenvalue / x.threshold).total_cmp(&(y.min_eigenvalue / y.threshold)));
    if let Some(s) = worst {
        if s.min_eigenvalue <= s.threshold {
            v.classification = if s.min_eigenvalue < -s.threshold { NiClass::NotNi } else { NiClass::NotSni };
            v.witness = Some(Witness::Frequency {
                omega: s.omega,
                min_eigenvalue: s.min_eigenvalue,
            });
        }
    }
    if v.classification == NiClass::Sni {
        v.warnings.push(format!(
            "SNI on tested grid: strict positivity verified on {} frequencies in [{:e}, {:e}] rad/s",
            diag.base_points + diag.refined_points - diag.skipped,
            diag.lo,
            diag.hi
        ));
    }
    v.grid = Some(diag);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::RMat;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::default()
    }

    fn oscillator(gain: f64) -> RealStateSpace {
        RealStateSpace::strictly_proper(
            RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
            RMat::from_row_slice(2, 1, &[0.0, 1.0]),
            RMat::from_row_slice(1, 2, &[gain, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn first_order_lag_is_ni() {
        let v = ni_frequency_oracle(&RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0), &grid()).unwrap();
        assert_eq!(v.classification, NiClass::Ni);
        assert!(v.grid.unwrap().min_eigenvalue > 0.0);
    }

    #[test]
    fn constant_symmetric_is_ni() {
        let d = RMat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -3.0]);
        let sys = RealStateSpace::new(RMat::zeros(0, 0), RMat::zeros(0, 2), RMat::zeros(2, 0), d).unwrap();
        assert_eq!(ni_frequency_oracle(&sys, &grid()).unwrap().classification, NiClass::Ni);
    }

    #[test]
    fn lossless_oscillator_residue() {
        let v = ni_frequency_oracle(&oscillator(1.0), &grid()).unwrap();
        assert_eq!(v.classification, NiClass::Ni);
        assert_eq!(v.residues.len(), 1);
        assert!((v.residues[0].residue[(0, 0)] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn negative_residue_is_not_ni() {
        let v = ni_frequency_oracle(&oscillator(-1.0), &grid()).unwrap();
        assert_eq!(v.classification, NiClass::NotNi);
        assert!(matches!(v.witness, Some(Witness::Residue { .. })));
    }

    #[test]
    fn unstable_pole_witness() {
        let v = ni_frequency_oracle(&RealStateSpace::scalar(1.0, 1.0, 1.0, 0.0), &grid()).unwrap();
        assert_eq!(v.classification, NiClass::NotNi);
        assert_eq!(v.witness, Some(Witness::Pole(Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn positive_real_lag_fails_on_grid() {
        // -1/(s+1) has j(M - M^*) = -2w/(1+w^2) < 0.
        let v = ni_frequency_oracle(&RealStateSpace::scalar(-1.0, 1.0, -1.0, 0.0), &grid()).unwrap();
        assert_eq!(v.classification, NiClass::NotNi);
        assert!(matches!(v.witness, Some(Witness::Frequency { .. })));
    }

    #[test]
    fn double_pole_on_axis_rejected() {
        // 1 / (s^2 + 1)^2
        let a = RMat::from_row_slice(4, 4, &[
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            -1.0, 0.0, -2.0, 0.0,
        ]);
        let b = RMat::from_row_slice(4, 1, &[0.0, 0.0, 0.0, 1.0]);
        let c = RMat::from_row_slice(1, 4, &[1.0, 0.0, 0.0, 0.0]);
        let sys = RealStateSpace::strictly_proper(a, b, c).unwrap();
        assert!(matches!(ni_frequency_oracle(&sys, &grid()), Err(NiError::NonSimplePoleOnAxis { order: 2, .. })));
    }

    #[test]
    fn triple_integrator_rejected() {
        let a = RMat::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let b = RMat::from_row_slice(3, 1, &[0.0, 0.0, 1.0]);
        let c = RMat::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let sys = RealStateSpace::strictly_proper(a, b, c).unwrap();
        assert_eq!(ni_frequency_oracle(&sys, &grid()), Err(NiError::OriginPoleOrderTooHigh { order: 3 }));
    }

    #[test]
    fn double_integrator_is_ni() {
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = RMat::from_row_slice(2, 1, &[0.0, 1.0]);
        let c = RMat::from_row_slice(1, 2, &[1.0, 0.0]);
        let sys = RealStateSpace::strictly_proper(a, b, c).unwrap();
        let v = ni_frequency_oracle(&sys, &grid()).unwrap();
        assert_eq!(v.classification, NiClass::Ni);
        assert!(v.has_origin_pole());
    }

    #[test]
    fn asymmetric_feedthrough() {
        let d = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let sys = RealStateSpace::new(RMat::zeros(0, 0), RMat::zeros(0, 2), RMat::zeros(2, 0), d).unwrap();
        let v = ni_frequency_oracle(&sys, &grid()).unwrap();
        assert!(matches!(v.witness, Some(Witness::Feedthrough { .. })));
    }

    #[test]
    fn sni_examples() {
        let g = grid();
        assert_eq!(sni_check(&RealStateSpace::scalar(-2.0, 1.0, 1.0, 0.0), &g).unwrap().classification, NiClass::Sni);
        let unstable = sni_check(&RealStateSpace::scalar(1.0, 1.0, 1.0, 0.0), &g).unwrap();
        assert_eq!(unstable.classification, NiClass::NotNi);
        assert_eq!(unstable.witness, Some(Witness::Pole(Complex64::new(1.0, 0.0))));
        let zero = sni_check(&RealStateSpace::scalar(-1.0, 1.0, 0.0, 0.0), &g).unwrap();
        assert_eq!(zero.classification, NiClass::NotSni);
        assert_eq!(sni_check(&oscillator(1.0), &g).unwrap().classification, NiClass::NotSni);
    }

    #[test]
    fn refinement_triggers_on_lossless_system() {
        let v = ni_frequency_oracle(&oscillator(1.0), &FrequencyGrid::log(0.1, 10.0, 50).unwrap()).unwrap();
        assert!(v.grid.unwrap().refined_points > 0);
    }
}
