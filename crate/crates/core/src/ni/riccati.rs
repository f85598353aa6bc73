use super::{NiClass, NiError, NiVerdict, RealStateSpace, RiccatiDiagnostics, Witness};
use crate::numlin::{
    hermitian_part, inverse, min_hermitian_eigenvalue, real_part, solve_are_extremal,
    to_complex, Branch, CMat, LinalgError, Tolerances, ABS_FLOOR,
};

/// Matrices `(A0, R, Q, G = B R^-1 B^T)` of the NI Riccati equation
/// `P A0 + A0^T P + P B R^-1 B^T P + Q = 0`.
pub struct NiRiccatiData {
    pub a0: CMat,
    pub r: CMat,
    pub q: CMat,
    pub g: CMat,
}

pub fn ni_riccati_data(sys: &RealStateSpace) -> Result<NiRiccatiData, NiError> {
    let a = to_complex(&sys.a);
    let b = to_complex(&sys.b);
    let c = to_complex(&sys.c);
    let cb = &c * &b;
    let r = &cb + cb.transpose();
    let r_inv = hermitian_part(&inverse(&r)?);
    let ca = &c * &a;
    Ok(NiRiccatiData {
        a0: &a - &b * &r_inv * &ca,
        q: hermitian_part(&(ca.transpose() * &r_inv * &ca)),
        g: hermitian_part(&(&b * &r_inv * b.transpose())),
        r,
    })
}

/// Residual of `P A0 + A0^T P + P G P + Q`.
pub fn ni_riccati_residual(data: &NiRiccatiData, p: &CMat) -> CMat {
    p * &data.a0 + data.a0.transpose() * p + p * &data.g * p + &data.q
}

/// Size of the largest term of the equation at `p`; residuals are judged
/// relative to it since rounding `p` alone costs about `eps |P G P|`.
pub fn residual_scale(data: &NiRiccatiData, p: &CMat) -> f64 {
    let pa = (p * &data.a0).norm();
    let pgp = (p * &data.g * p).norm();
    [1.0, data.q.norm(), 2.0 * pa, pgp].into_iter().fold(0.0, f64::max)
}

pub fn ni_riccati_test(sys: &RealStateSpace) -> Result<NiVerdict, NiError> {
    ni_riccati_test_with(sys, &Tolerances::default())
}

/// NI test through the Riccati form of the NI lemma.
///
/// Negating the equation gives `P(-A0) + (-A0)^T P - P G P - Q = 0`, a
/// standard ARE with `G >= 0` whose stabilizing (maximal) solution bounds
/// every other solution from above. If it is PSD the system is NI with that
/// certificate; otherwise no PSD solution exists.
pub fn ni_riccati_test_with(sys: &RealStateSpace, tol: &Tolerances) -> Result<NiVerdict, NiError> {
    let asymmetry = (&sys.d - sys.d.transpose()).norm();
    if asymmetry > tol.predicate * sys.d.norm().max(ABS_FLOOR) {
        return Err(NiError::DNotSymmetric { asymmetry });
    }
    let cb = &sys.c * &sys.b;
    let r = &cb + cb.transpose();
    let r_min = min_hermitian_eigenvalue(&to_complex(&r))?;
    if sys.ports() == 0 || r_min <= tol.predicate * r.norm().max(ABS_FLOOR) {
        return Err(NiError::PreconditionRViolated { min_eigenvalue: r_min });
    }
    let minimality = sys.minimality()?;
    if !minimality.is_minimal() {
        return Err(NiError::NotMinimal(format!(
            "uncontrollable modes {:?}, unobservable modes {:?}",
            minimality.uncontrollable_modes, minimality.unobservable_modes
        )));
    }

    let data = ni_riccati_data(sys)?;
    let flipped_a = -&data.a0;
    let flipped_q = -&data.q;

    let maximal = match solve_are_extremal(&flipped_a, &data.g, &flipped_q, Branch::Stabilizing) {
        Ok(sol) => sol,
        Err(LinalgError::OddAxisMultiplicity { frequency }) => {
            // (-A0, B) is controllable because (A, B) is, so an odd
            // partial multiplicity rules out every symmetric solution.
            let mut v = NiVerdict::new(NiClass::NotNi);
            v.witness = Some(Witness::HamiltonianAxis { frequency: frequency.abs() });
            return Ok(v);
        }
        Err(e) => {
            let mut v = NiVerdict::new(NiClass::Indeterminate);
            v.warnings.push(format!("maximal Riccati solution not computable: {e}"));
            return Ok(v);
        }
    };
    let p = hermitian_part(&maximal.x);
    let residual = ni_riccati_residual(&data, &p).norm();
    let res_scale = residual_scale(&data, &p);
    let min_eigenvalue = min_hermitian_eigenvalue(&p)?;
    let anti = solve_are_extremal(&flipped_a, &data.g, &flipped_q, Branch::AntiStabilizing)
        .ok()
        .and_then(|s| min_hermitian_eigenvalue(&s.x).ok());
    let diagnostics = RiccatiDiagnostics {
        r: r.clone(),
        residual,
        relative_residual: residual / res_scale,
        min_eigenvalue,
        axis_eigenvalues: maximal.axis_eigenvalues,
        anti_stabilizing_min_eigenvalue: anti,
    };

    let mut v = NiVerdict::new(NiClass::Indeterminate);
    if residual > tol.are_residual * res_scale {
        v.warnings.push(format!(
            "maximal Riccati solution residual {:e} exceeds {:e}",
            residual / res_scale,
            tol.are_residual
        ));
    } else if min_eigenvalue >= -tol.predicate * p.norm().max(1.0) {
        v.classification = NiClass::Ni;
        v.certificate = Some(real_part(&p));
    } else {
        v.classification = NiClass::NotNi;
        v.witness = Some(Witness::RiccatiSolution { min_eigenvalue });
    }
    v.riccati = Some(diagnostics);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::RMat;

    #[test]
    fn lag_has_unit_certificate() {
        let v = ni_riccati_test(&RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!(v.classification, NiClass::Ni);
        let p = v.certificate.unwrap();
        assert!((p[(0, 0)] - 1.0).abs() < 1e-7, "P = {}", p[(0, 0)]);
    }

    #[test]
    fn unstable_lag_has_no_psd_solution() {
        let v = ni_riccati_test(&RealStateSpace::scalar(1.0, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!(v.classification, NiClass::NotNi);
        match v.witness {
            Some(Witness::RiccatiSolution { min_eigenvalue }) => assert!((min_eigenvalue + 1.0).abs() < 1e-7),
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn negative_r_rejected() {
        let err = ni_riccati_test(&RealStateSpace::scalar(-1.0, 1.0, -1.0, 0.0)).unwrap_err();
        assert!(matches!(err, NiError::PreconditionRViolated { min_eigenvalue } if (min_eigenvalue + 2.0).abs() < 1e-12));
    }

    #[test]
    fn scalar_data_matches_hand_values() {
        let d = ni_riccati_data(&RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0)).unwrap();
        assert!((d.a0[(0, 0)].re + 0.5).abs() < 1e-15);
        assert!((d.q[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((d.r[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_minimal_rejected() {
        let a = RMat::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        let b = RMat::from_row_slice(2, 1, &[1.0, 0.0]);
        let c = RMat::from_row_slice(1, 2, &[1.0, 1.0]);
        let sys = RealStateSpace::strictly_proper(a, b, c).unwrap();
        assert!(matches!(ni_riccati_test(&sys), Err(NiError::NotMinimal(_))));
    }

    #[test]
    fn asymmetric_d_rejected() {
        let mut sys = RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0);
        sys.b = RMat::from_row_slice(1, 2, &[1.0, 0.0]);
        sys.c = RMat::from_row_slice(2, 1, &[1.0, 0.0]);
        sys.d = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(ni_riccati_test(&sys), Err(NiError::DNotSymmetric { .. })));
    }
}
