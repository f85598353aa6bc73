use num_complex::Complex64;

use super::{sni_check_with, ni_frequency_oracle_with, FrequencyGrid, NiClass, NiError, RealStateSpace};
use crate::numlin::{
    block_diag, eigenvalues, hermitian_eigenvalues, identity, inverse, scaled, spectral_abscissa, to_complex,
    CMat, RMat, Tolerances, ABS_FLOOR,
};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// `lambda_max(M(0) N(0)) < 1`.
    pub stable: bool,
    pub lambda_max: f64,
    pub dc_eigenvalues: Vec<Complex64>,
    pub closed_loop: RMat,
    pub closed_loop_eigenvalues: Vec<Complex64>,
    pub closed_loop_hurwitz: bool,
    /// Whether the DC-gain verdict and the closed-loop spectrum agree.
    pub agrees: bool,
    pub warnings: Vec<String>,
}

/// State matrix of the positive-feedback loop `u_M = y_N`, `u_N = y_M`.
pub fn positive_feedback_matrix(m: &RealStateSpace, n: &RealStateSpace) -> Result<RMat, NiError> {
    let (nm, nn) = (m.states(), n.states());
    let p = m.ports();
    if n.ports() != p {
        return Err(NiError::DimensionMismatch(format!("M is {p}x{p} but N is {}x{}", n.ports(), n.ports())));
    }
    let ad = block_diag(&[&to_complex(&m.a), &to_complex(&n.a)]);
    let cd = block_diag(&[&to_complex(&m.c), &to_complex(&n.c)]);
    let mut bsw = CMat::zeros(nm + nn, 2 * p);
    bsw.view_mut((0, p), (nm, p)).copy_from(&to_complex(&m.b));
    bsw.view_mut((nm, 0), (nn, p)).copy_from(&to_complex(&n.b));
    let mut loop_gain = identity(2 * p);
    loop_gain.view_mut((0, p), (p, p)).copy_from(&(-to_complex(&m.d)));
    loop_gain.view_mut((p, 0), (p, p)).copy_from(&(-to_complex(&n.d)));
    let closed = ad + bsw * inverse(&loop_gain)? * cd;
    Ok(closed.map(|z| z.re))
}

pub fn interconnection_stability(m: &RealStateSpace, n: &RealStateSpace) -> Result<StabilityReport, NiError> {
    interconnection_stability_with(m, n, &FrequencyGrid::default(), &Tolerances::default())
}

/// DC-gain stability test for the positive-feedback loop of an NI system `M`
/// without poles at the origin and an SNI system `N`, with
/// `M(inf) N(inf) = 0` and `N(inf) >= 0`. Each hypothesis is checked first.
pub fn interconnection_stability_with(
    m: &RealStateSpace,
    n: &RealStateSpace,
    grid: &FrequencyGrid,
    tol: &Tolerances,
) -> Result<StabilityReport, NiError> {
    if m.ports() != n.ports() {
        return Err(NiError::DimensionMismatch(format!(
            "M is {0}x{0} but N is {1}x{1}",
            m.ports(),
            n.ports()
        )));
    }
    let mv = ni_frequency_oracle_with(m, grid, tol)?;
    if mv.classification != NiClass::Ni {
        return Err(NiError::HypothesisViolation(format!(
            "M is not NI (classified {}, witness {:?})",
            mv.classification.label(),
            mv.witness
        )));
    }
    if mv.has_origin_pole() {
        return Err(NiError::HypothesisViolation("M has a pole at the origin".into()));
    }
    let nv = sni_check_with(n, grid, tol)?;
    if nv.classification != NiClass::Sni {
        return Err(NiError::HypothesisViolation(format!(
            "N is not SNI (classified {}, witness {:?})",
            nv.classification.label(),
            nv.witness
        )));
    }
    let dd = &m.d * &n.d;
    if dd.norm() > tol.predicate * (m.d.norm() * n.d.norm()).max(ABS_FLOOR) {
        return Err(NiError::HypothesisViolation(format!("M(inf) N(inf) != 0 (norm {:e})", dd.norm())));
    }
    let nd_min = hermitian_eigenvalues(&to_complex(&n.d))?.first().copied().unwrap_or(0.0);
    if nd_min < -tol.predicate * n.d.norm().max(ABS_FLOOR) {
        return Err(NiError::HypothesisViolation(format!("N(inf) is not PSD (min eigenvalue {nd_min:e})")));
    }

    let m0 = m
        .dc_gain()
        .map_err(|_| NiError::HypothesisViolation("M has a pole at the origin".into()))?;
    let n0 = n.dc_gain()?;
    let dc_eigenvalues = eigenvalues(&to_complex(&(&m0 * &n0)))?;
    let lambda_max = dc_eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let stable = lambda_max < 1.0;

    let closed_loop = positive_feedback_matrix(m, n)?;
    let closed_c = to_complex(&closed_loop);
    let closed_loop_eigenvalues = eigenvalues(&closed_c)?;
    let abscissa = spectral_abscissa(&closed_c)?;
    let closed_loop_hurwitz = abscissa < -scaled(tol.axis, closed_c.norm());
    let mut warnings = mv.warnings;
    warnings.extend(nv.warnings);
    let agrees = stable == closed_loop_hurwitz;
    if !agrees {
        warnings.push(format!(
            "DC-gain verdict disagrees with closed-loop spectrum (abscissa {abscissa:e})"
        ));
    }
    Ok(StabilityReport {
        stable,
        lambda_max,
        dc_eigenvalues,
        closed_loop,
        closed_loop_eigenvalues,
        closed_loop_hurwitz,
        agrees,
        warnings,
    })
}
