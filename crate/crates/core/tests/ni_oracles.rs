//! NI analysis checked against analytic values and against each other.

mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use riccati_synth::ni::*;
use riccati_synth::numlin::{
    eigenvalues, hermitian_eigenvalues, is_hurwitz, real_part, to_complex, RMat,
};

#[test]
fn lag_grid_matches_analytic_expression() {
    let sys = RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0);
    for w in logspace(1e-3, 1e3, 200) {
        let m = sys.eval(Complex64::new(0.0, w)).unwrap()[(0, 0)];
        let jdiff = (Complex64::new(0.0, 1.0) * (m - m.conj())).re;
        assert!((jdiff - 2.0 * w / (1.0 + w * w)).abs() <= 1e-14);
    }
}

#[test]
fn oscillator_residue_matches_analytic() {
    let sys = RealStateSpace::strictly_proper(
        real(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        real(2, 1, &[0.0, 1.0]),
        real(1, 2, &[1.0, 0.0]),
    )
    .unwrap();
    let v = ni_frequency_oracle(&sys, &FrequencyGrid::default()).unwrap();
    assert_eq!(v.classification, NiClass::Ni);
    let r = &v.residues[0];
    assert_eq!(r.kind, PoleKind::Axis);
    assert!((r.pole - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    assert!((r.residue[(0, 0)] - c(0.5)).norm() < 1e-12);
}

fn certificate_from(sys: &RealStateSpace, p: &RMat) -> NiCertificate {
    let cb = &sys.c * &sys.b;
    let r = &cb + cb.transpose();
    let w = r.cholesky().unwrap().l().transpose();
    let w_inv_t = w.transpose().try_inverse().unwrap();
    let l = -(w_inv_t * (sys.b.transpose() * p - &sys.c * &sys.a));
    NiCertificate { p: p.clone(), w, l }
}

#[test]
fn riccati_and_frequency_oracles_agree() {
    let mut g = rng(1);
    let grid = FrequencyGrid::default();
    let (mut ni, mut not_ni) = (0, 0);
    for trial in 0..200 {
        let m = 1 + trial % 3;
        let sys = if trial % 2 == 0 {
            ni_system(&mut g, m + trial % 3, trial % 3, m, trial % 4 == 0)
        } else {
            random_r_positive(&mut g, m + 1 + trial % 4, m, if trial % 3 == 0 { None } else { Some(0.2) })
        };
        let ric = ni_riccati_test(&sys).unwrap();
        let freq = ni_frequency_oracle(&sys, &grid).unwrap();
        match ric.classification {
            NiClass::Ni => {
                ni += 1;
                assert_eq!(freq.classification, NiClass::Ni, "trial {trial}");
                let diag = ric.riccati.as_ref().unwrap();
                assert!(diag.relative_residual <= 1e-8, "trial {trial}: residual {:e}", diag.relative_residual);
                let p = ric.certificate.as_ref().unwrap();
                let min = hermitian_eigenvalues(&to_complex(p)).unwrap()[0];
                assert!(min >= -1e-9 * p.norm().max(1.0));
            }
            NiClass::NotNi => {
                not_ni += 1;
                assert_eq!(freq.classification, NiClass::NotNi, "trial {trial}");
                assert!(ric.witness.is_some());
            }
            other => panic!("trial {trial}: undecided {other:?}"),
        }
    }
    assert!(ni > 50 && not_ni > 50, "{ni} NI / {not_ni} NotNI");
}

#[test]
fn riccati_certificate_satisfies_lmi() {
    let mut g = rng(3);
    for trial in 0..30 {
        let m = 1 + trial % 2;
        let sys = ni_system(&mut g, m + 1, trial % 2, m, false);
        let v = ni_riccati_test(&sys).unwrap();
        assert_eq!(v.classification, NiClass::Ni);
        let p = v.certificate.unwrap();
        if p.norm() > 1e3 {
            continue;
        }
        assert!(verify_lmi_certificate(&sys, &certificate_from(&sys, &p)).unwrap(), "trial {trial}");
    }
}

#[test]
fn stability_biconditional_on_generated_pairs() {
    let mut g = rng(2);
    let grid = FrequencyGrid::default();
    let (mut stable, mut unstable) = (0, 0);
    for trial in 0..100 {
        let m = 1 + trial % 2;
        let msys = ni_system(&mut g, m + trial % 2, trial % 2, m, trial % 3 == 0);
        let nsys = sni_system(&mut g, m + trial % 3, m);
        let m0 = msys.dc_gain().unwrap();
        let n0 = nsys.dc_gain().unwrap();
        let lam = eigenvalues(&to_complex(&(&m0 * &n0))).unwrap().iter().map(|z| z.re).fold(f64::MIN, f64::max);
        let target = if trial % 2 == 0 { uniform(&mut g, 0.2, 0.9) } else { uniform(&mut g, 1.1, 3.0) };
        let nsys = if lam > 1e-3 { scale_gain(&nsys, target / lam) } else { nsys };
        let report = interconnection_stability_with(&msys, &nsys, &grid, &Default::default()).unwrap();
        assert!(report.agrees, "trial {trial}: lambda_max {} hurwitz {}", report.lambda_max, report.closed_loop_hurwitz);
        let independent = is_hurwitz(&to_complex(&positive_feedback_matrix(&msys, &nsys).unwrap()), 1e-10).unwrap();
        assert_eq!(report.stable, independent, "trial {trial}");
        if report.stable { stable += 1 } else { unstable += 1 }
    }
    assert!(stable > 20 && unstable > 20, "{stable} stable / {unstable} unstable");
}

#[test]
fn closed_loop_matrix_matches_transfer_feedback() {
    // (I - M N) y = ... : check the loop through transfer functions at one point.
    let mut g = rng(9);
    let msys = ni_system(&mut g, 2, 1, 2, true);
    let nsys = sni_system(&mut g, 3, 2);
    let acl = positive_feedback_matrix(&msys, &nsys).unwrap();
    // Closed-loop poles are the zeros of det(I - M(s) N(s)).
    for z in eigenvalues(&to_complex(&acl)).unwrap() {
        let mm = msys.eval(z);
        let nn = nsys.eval(z);
        if let (Ok(mm), Ok(nn)) = (mm, nn) {
            let loop_mat = riccati_synth::numlin::identity(2) - mm * nn;
            let det = loop_mat.determinant();
            assert!(det.norm() < 1e-6, "det {det} at {z}");
        }
    }
}

#[test]
fn lmi_certificate_examples() {
    let lag = RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0);
    let one = |x| RMat::from_element(1, 1, x);
    let s2 = 2f64.sqrt();
    assert!(verify_lmi_certificate(&lag, &NiCertificate { p: one(1.0), w: one(-s2), l: one(s2) }).unwrap());
    assert!(!verify_lmi_certificate(&lag, &NiCertificate { p: one(1.0 + 1e-2), w: one(-s2), l: one(s2) }).unwrap());
    let neg = RealStateSpace::scalar(-1.0, 1.0, -1.0, 0.0);
    assert!(!verify_lmi_certificate(&neg, &NiCertificate { p: one(0.0), w: one(0.0), l: one(0.0) }).unwrap());
}

#[test]
fn riccati_scalar_examples() {
    let v = ni_riccati_test(&RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0)).unwrap();
    assert_eq!(v.classification, NiClass::Ni);
    assert!((v.certificate.unwrap()[(0, 0)] - 1.0).abs() < 1e-7);
    let v = ni_riccati_test(&RealStateSpace::scalar(1.0, 1.0, 1.0, 0.0)).unwrap();
    assert_eq!(v.classification, NiClass::NotNi);
    assert!(matches!(
        ni_riccati_test(&RealStateSpace::scalar(-1.0, 1.0, -1.0, 0.0)),
        Err(NiError::PreconditionRViolated { .. })
    ));
}

#[test]
fn oracle_errors() {
    assert!(matches!(FrequencyGrid::log(1e-3, 1e3, 0), Err(NiError::GridEmpty)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classification_is_similarity_invariant(seed in any::<u64>(), ni in any::<bool>()) {
        let mut g = rng(seed);
        let m = 1 + (seed % 2) as usize;
        let sys = if ni {
            ni_system(&mut g, m + 1, 1, m, seed % 3 == 0)
        } else {
            random_r_positive(&mut g, m + 2, m, Some(0.3))
        };
        let t = similarity(&mut g, sys.states());
        let moved = sys.similarity(&t).unwrap();
        let grid = FrequencyGrid::log(1e-3, 1e3, 400).unwrap();
        let a = ni_frequency_oracle(&sys, &grid).unwrap().classification;
        let b = ni_frequency_oracle(&moved, &grid).unwrap().classification;
        prop_assert_eq!(a, b);
        let ra = ni_riccati_test(&sys).unwrap().classification;
        let rb = ni_riccati_test(&moved).unwrap().classification;
        prop_assert_eq!(ra, rb);
    }

    #[test]
    fn dc_gain_is_real_part_at_zero(seed in any::<u64>()) {
        let mut g = rng(seed);
        let sys = ni_system(&mut g, 2, 1, 2, true);
        let dc = sys.dc_gain().unwrap();
        let direct = real_part(&sys.eval(Complex64::new(0.0, 0.0)).unwrap());
        prop_assert!((dc - direct).norm() <= 1e-12);
    }
}
