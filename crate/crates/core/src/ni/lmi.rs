use super::{NiError, RealStateSpace};
use crate::numlin::{hermitian_eigenvalues, to_complex, RMat, ABS_FLOOR};

/// Candidate `(P, W, L)` for the NI lemma's LMI.
#[derive(Debug, Clone, PartialEq)]
pub struct NiCertificate {
    pub p: RMat,
    pub w: RMat,
    pub l: RMat,
}

const EQUALITY_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-9;

fn close(lhs: &RMat, rhs: &RMat, terms: &[f64]) -> bool {
    let scale = terms.iter().copied().fold(1.0, f64::max);
    (lhs - rhs).norm() <= EQUALITY_TOL * scale
}

/// Checks `P = P^T >= 0`, the three block equalities
/// `PA + A^T P = -L^T L`, `PB - A^T C^T = -L^T W`, `CB + B^T C^T = W^T W`
/// and negative semidefiniteness of the assembled block matrix.
pub fn verify_lmi_certificate(sys: &RealStateSpace, cert: &NiCertificate) -> Result<bool, NiError> {
    let n = sys.states();
    let m = sys.ports();
    let (p, w, l) = (&cert.p, &cert.w, &cert.l);
    if p.shape() != (n, n) || w.shape() != (m, m) || l.shape() != (m, n) {
        return Err(NiError::DimensionMismatch(format!(
            "certificate for n = {n}, m = {m}: P {}x{}, W {}x{}, L {}x{}",
            p.nrows(),
            p.ncols(),
            w.nrows(),
            w.ncols(),
            l.nrows(),
            l.ncols()
        )));
    }
    let (a, b, c) = (&sys.a, &sys.b, &sys.c);
    let pnorm = p.norm().max(ABS_FLOOR);
    if (p - p.transpose()).norm() > PSD_TOL * pnorm {
        return Ok(false);
    }
    if n > 0 && hermitian_eigenvalues(&to_complex(p))?[0] < -PSD_TOL * pnorm {
        return Ok(false);
    }

    let pa = p * a;
    let ltl = l.transpose() * l;
    let top_left = &pa + pa.transpose();
    if !close(&top_left, &(-&ltl), &[pa.norm(), ltl.norm()]) {
        return Ok(false);
    }
    let pb = p * b;
    let atct = a.transpose() * c.transpose();
    let ltw = l.transpose() * w;
    if !close(&(&pb - &atct), &(-&ltw), &[pb.norm(), atct.norm(), ltw.norm()]) {
        return Ok(false);
    }
    let cb = c * b;
    let wtw = w.transpose() * w;
    let r = &cb + cb.transpose();
    if !close(&r, &wtw, &[cb.norm(), wtw.norm()]) {
        return Ok(false);
    }

    let mut block = RMat::zeros(n + m, n + m);
    block.view_mut((0, 0), (n, n)).copy_from(&top_left);
    let off = &pb - &atct;
    block.view_mut((0, n), (n, m)).copy_from(&off);
    block.view_mut((n, 0), (m, n)).copy_from(&off.transpose());
    block.view_mut((n, n), (m, m)).copy_from(&(-&r));
    let top = hermitian_eigenvalues(&to_complex(&block))?.last().copied().unwrap_or(0.0);
    Ok(top <= PSD_TOL * block.norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(x: f64) -> RMat {
        RMat::from_element(1, 1, x)
    }

    fn lag() -> RealStateSpace {
        RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0)
    }

    #[test]
    fn lag_certificate() {
        let s2 = 2f64.sqrt();
        let good = NiCertificate { p: one(1.0), w: one(-s2), l: one(s2) };
        assert!(verify_lmi_certificate(&lag(), &good).unwrap());
        let wrong_sign = NiCertificate { p: one(1.0), w: one(s2), l: one(s2) };
        assert!(!verify_lmi_certificate(&lag(), &wrong_sign).unwrap());
    }

    #[test]
    fn zero_p_with_negative_r() {
        let sys = RealStateSpace::scalar(-1.0, 1.0, -1.0, 0.0);
        let cert = NiCertificate { p: one(0.0), w: one(0.0), l: one(0.0) };
        assert!(!verify_lmi_certificate(&sys, &cert).unwrap());
    }

    #[test]
    fn perturbed_p() {
        let s2 = 2f64.sqrt();
        let cert = NiCertificate { p: one(1.01), w: one(-s2), l: one(s2) };
        assert!(!verify_lmi_certificate(&lag(), &cert).unwrap());
    }

    #[test]
    fn shape_checked() {
        let cert = NiCertificate { p: RMat::zeros(2, 2), w: one(0.0), l: one(0.0) };
        assert!(matches!(verify_lmi_certificate(&lag(), &cert), Err(NiError::DimensionMismatch(_))));
    }
}
