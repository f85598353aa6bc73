//! Linear-algebra kernels checked against independent oracles.

mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use riccati_synth::numlin::*;

/// Characteristic polynomial coefficients (ascending powers) by Faddeev-LeVerrier.
fn char_poly(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![c(0.0); n + 1];
    coeffs[n] = c(1.0);
    let mut m = CMat::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        m = next;
        let am = a * &m;
        coeffs[n - k] = -am.trace() / (k as f64);
    }
    coeffs
}

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = c(0.0);
    let mut dp = c(0.0);
    for &co in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + co;
    }
    (p, dp)
}

/// Aberth-Ehrlich simultaneous root iteration.
fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = poly_eval(coeffs, roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| c(1.0) / (roots[i] - roots[j]))
                .sum();
            let step = ratio / (c(1.0) - ratio * repulsion);
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    roots
}

fn match_multisets(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

#[test]
fn eig_matches_characteristic_polynomial_roots() {
    let mut g = rng(8);
    let a = to_complex(&randn(&mut g, 8, 8));
    let e = eig(&a).unwrap();
    let roots = poly_roots(&char_poly(&a));
    let dist = match_multisets(&e.values, &roots);
    assert!(dist <= 1e-8, "eigenvalues differ from polynomial roots by {dist:e}");
    assert!(e.max_relative_residual(&a) <= 1e-9);
    for w in e.values.windows(2) {
        assert!(w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im));
    }
}

#[test]
fn eig_is_bitwise_deterministic() {
    let mut g = rng(81);
    let a = randn_c(&mut g, 12, 12);
    let first = eig(&a).unwrap();
    let second = eig(&a).unwrap();
    assert_eq!(first.values, second.values);
    assert_eq!(first.vectors, second.vectors);
}

#[test]
fn ordered_schur_random_six_by_six() {
    let mut g = rng(6);
    for _ in 0..10 {
        let a = to_complex(&randn(&mut g, 6, 6));
        let s = ordered_schur(&a, |z| z.re <= 0.0).unwrap();
        let k = s.selected;
        let lead = eigenvalues(&s.t.view((0, 0), (k, k)).into_owned()).unwrap();
        let trail = eigenvalues(&s.t.view((k, k), (6 - k, 6 - k)).into_owned()).unwrap();
        assert!(lead.iter().all(|z| z.re <= 0.0));
        assert!(trail.iter().all(|z| z.re > 0.0));
        let spectrum = eigenvalues(&a).unwrap();
        let mut both = lead.clone();
        both.extend(trail);
        assert!(match_multisets(&spectrum, &both) <= 1e-8);
    }
}

#[test]
fn sylvester_and_lyapunov_match_kronecker_oracle() {
    let mut g = rng(7);
    for n in 1..=8 {
        for m in [1, n.max(2) - 1, n] {
            let a = stable_c(&mut g, m, 0.3);
            let b = stable_c(&mut g, n, 0.3);
            let rhs = randn_c(&mut g, m, n);
            let x = solve_sylvester(&a, &b, &rhs).unwrap();
            let oracle = kronecker_sylvester(&a, &b, &rhs);
            assert!((&x - &oracle).norm() <= 1e-9 * oracle.norm().max(1.0), "n={n} m={m}");
        }
        let a = to_complex(&stable_r(&mut g, n, 0.2));
        let q = to_complex(&randn(&mut g, n, n));
        let q = &q * q.adjoint();
        let p = solve_lyapunov(&a, &q).unwrap();
        let oracle = kronecker_sylvester(&a, &a.adjoint(), &(-&q));
        assert!((&p - &oracle).norm() <= 1e-9 * oracle.norm().max(1.0));
    }
}

#[test]
fn lyapunov_random_stable_ten_by_ten() {
    let mut g = rng(10);
    let a = to_complex(&stable_r(&mut g, 10, 0.5));
    let q = CMat::identity(10, 10);
    let p = solve_lyapunov(&a, &q).unwrap();
    let resid = (&a * &p + &p * a.adjoint() + &q).norm();
    assert!(resid <= 1e-9 * q.norm().max(1.0));
    assert!(is_pd(&p, 1e-9).unwrap());
}

#[test]
fn hinf_norm_matches_dense_grid() {
    let mut g = rng(66);
    let grid = logspace(1e-3, 1e3, 10_000);
    let a = stable_r(&mut g, 6, 0.3);
    let sys = ComplexStateSpace::new(
        to_complex(&a),
        to_complex(&randn(&mut g, 6, 2)),
        to_complex(&randn(&mut g, 3, 6)),
        CMat::zeros(3, 2),
    )
    .unwrap();
    let norm = hinf_norm(&sys).unwrap().value;
    let grid_max = std::iter::once(0.0)
        .chain(grid.iter().copied())
        .map(|w| sigma_max(&transfer_eval(&sys, Complex64::new(0.0, w)).unwrap()))
        .fold(0.0, f64::max);
    assert!((norm - grid_max).abs() <= 1e-4 * norm, "{norm} vs grid {grid_max}");
}

#[test]
fn care_residual_and_stability_on_random_systems() {
    let mut g = rng(2024);
    for trial in 0..30 {
        let n = 2 + trial % 9;
        let m = 1 + trial % 3;
        let a = randn_c(&mut g, n, n);
        let b = randn_c(&mut g, n, m);
        let cc = randn_c(&mut g, m, n);
        let q = cc.adjoint() * &cc;
        let r = CMat::identity(m, m);
        let sol = solve_care(&a, &b, &q, &r).unwrap();
        let resid = (a.adjoint() * &sol.x + &sol.x * &a - &sol.x * &b * b.adjoint() * &sol.x + &q).norm();
        assert!(resid <= 1e-8 * q.norm().max(1.0));
        assert!(is_hermitian(&sol.x, 1e-12));
        assert!(is_hurwitz(&(&a - &b * b.adjoint() * &sol.x), 1e-10).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lyapunov_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut g = rng(seed);
        let n = 1 + (seed % 7) as usize;
        let a = stable_c(&mut g, n, 0.5);
        let q1 = randn_c(&mut g, n, n);
        let q2 = randn_c(&mut g, n, n);
        let combined = solve_lyapunov(&a, &(q1.scale(alpha) + q2.scale(beta))).unwrap();
        let separate = solve_lyapunov(&a, &q1).unwrap().scale(alpha) + solve_lyapunov(&a, &q2).unwrap().scale(beta);
        prop_assert!((&combined - &separate).norm() <= 1e-9 * separate.norm().max(1.0));
    }

    #[test]
    fn schur_round_trip(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = 1 + (seed % 12) as usize;
        let a = randn_c(&mut g, n, n);
        let s = ordered_schur(&a, |z| z.im >= 0.0).unwrap();
        let scale = a.norm();
        prop_assert!((s.reconstruct() - &a).norm() <= 1e-9 * scale);
        prop_assert!((s.u.adjoint() * &s.u - CMat::identity(n, n)).norm() <= 1e-10);
        let spectrum = eigenvalues(&a).unwrap();
        prop_assert!(match_multisets(&spectrum, &s.eigenvalues()) <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn hinf_norm_bounds_sampled_gains(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = 1 + (seed % 5) as usize;
        let sys = ComplexStateSpace::new(
            stable_c(&mut g, n, 0.2),
            randn_c(&mut g, n, 2),
            randn_c(&mut g, 2, n),
            randn_c(&mut g, 2, 2).scale(0.3),
        ).unwrap();
        let norm = hinf_norm(&sys).unwrap().value;
        for w in logspace(1e-2, 1e2, 60).into_iter().flat_map(|w| [w, -w]) {
            let gain = sigma_max(&transfer_eval(&sys, Complex64::new(0.0, w)).unwrap());
            prop_assert!(norm >= gain - 1e-6, "norm {} below gain {} at {}", norm, gain, w);
        }
    }
}
