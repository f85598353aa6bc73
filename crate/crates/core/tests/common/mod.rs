//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use riccati_synth::ni::RealStateSpace;
use riccati_synth::numlin::{spectral_abscissa, to_complex, CMat, RMat};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RMat {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn randn_c(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random matrix shifted so that its spectral abscissa is `-margin`.
pub fn stable_c(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> CMat {
    let a = randn_c(rng, n, n);
    let shift = spectral_abscissa(&a).unwrap() + margin;
    let mut out = a;
    for i in 0..n {
        out[(i, i)] -= Complex64::new(shift, 0.0);
    }
    out
}

pub fn stable_r(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> RMat {
    let a = randn(rng, n, n);
    let shift = spectral_abscissa(&to_complex(&a)).unwrap() + margin;
    let mut out = a;
    for i in 0..n {
        out[(i, i)] -= shift;
    }
    out
}

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn real(rows: usize, cols: usize, data: &[f64]) -> RMat {
    DMatrix::from_row_slice(rows, cols, data)
}

pub fn creal(rows: usize, cols: usize, data: &[f64]) -> CMat {
    to_complex(&real(rows, cols, data))
}

pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Random orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> RMat {
    randn(rng, n, n).qr().q()
}

/// Well-conditioned random similarity: orthogonal times a diagonal scaling.
pub fn similarity(rng: &mut ChaCha8Rng, n: usize) -> RMat {
    let q = orthogonal(rng, n);
    let d = RMat::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| uniform(rng, 0.5, 2.0)));
    q * d
}

/// NI system built from `lags` first-order terms `k v v^T / (s + a)` and
/// `modes` damped resonances `psi psi^T / (s^2 + 2 zeta w s + w^2)`, plus a
/// symmetric feedthrough when `feedthrough` is set, in random coordinates.
pub fn ni_system(rng: &mut ChaCha8Rng, lags: usize, modes: usize, m: usize, feedthrough: bool) -> RealStateSpace {
    let n = lags + 2 * modes;
    let mut a = RMat::zeros(n, n);
    let mut b = RMat::zeros(n, m);
    let mut cm = RMat::zeros(m, n);
    for i in 0..lags {
        let pole = uniform(rng, 0.2, 5.0);
        let k = uniform(rng, 0.2, 2.0).sqrt();
        let v = randn(rng, m, 1);
        a[(i, i)] = -pole;
        b.row_mut(i).copy_from(&(v.transpose() * k));
        cm.column_mut(i).copy_from(&(&v * k));
    }
    for j in 0..modes {
        let i = lags + 2 * j;
        let w = uniform(rng, 0.3, 5.0);
        let zeta = uniform(rng, 0.05, 0.7);
        let psi = randn(rng, m, 1);
        a[(i, i + 1)] = 1.0;
        a[(i + 1, i)] = -w * w;
        a[(i + 1, i + 1)] = -2.0 * zeta * w;
        b.row_mut(i + 1).copy_from(&psi.transpose());
        cm.column_mut(i).copy_from(&psi);
    }
    let d = if feedthrough {
        let g = randn(rng, m, m);
        (&g + g.transpose()) * 0.5
    } else {
        RMat::zeros(m, m)
    };
    let t = similarity(rng, n);
    RealStateSpace::new(a, b, cm, d).unwrap().similarity(&t).unwrap()
}

/// Random system with `CB + B^T C^T > 0` (rejection sampled).
pub fn random_r_positive(rng: &mut ChaCha8Rng, n: usize, m: usize, margin: Option<f64>) -> RealStateSpace {
    loop {
        let a = match margin {
            Some(mg) => stable_r(rng, n, mg),
            None => randn(rng, n, n),
        };
        let b = randn(rng, n, m);
        let c = randn(rng, m, n);
        let cb = &c * &b;
        let r = &cb + cb.transpose();
        if r.symmetric_eigenvalues().min() > 0.1 {
            let g = randn(rng, m, m);
            return RealStateSpace::new(a, b, c, (&g + g.transpose()) * 0.5).unwrap();
        }
    }
}

/// SNI system: `lags >= m` first-order terms with spanning directions, no feedthrough.
pub fn sni_system(rng: &mut ChaCha8Rng, lags: usize, m: usize) -> RealStateSpace {
    ni_system(rng, lags.max(m), 0, m, false)
}

/// Multiplies the output matrix (and feedthrough) by `k`.
pub fn scale_gain(sys: &RealStateSpace, k: f64) -> RealStateSpace {
    RealStateSpace::new(sys.a.clone(), sys.b.clone(), &sys.c * k, &sys.d * k).unwrap()
}

/// Random plant with `C1 B2` invertible, `R > 0` and at least one anti-stable
/// eigenvalue of `A_f`; `T - S > 0` is not guaranteed. Needs `m < n`, since
/// `A_f = 0` when `C1` is square and invertible.
pub fn synth_plant(rng: &mut ChaCha8Rng, n: usize, m: usize) -> riccati_synth::ni_synth::UncertainPlant {
    assert!(m < n);
    use riccati_synth::ni_synth::{af_matrix, UncertainPlant};
    loop {
        let a = randn(rng, n, n);
        let c1 = randn(rng, m, n);
        let b2 = randn(rng, n, m);
        // B1 = C1^T H + (null-space part) keeps C1 B1 + B1^T C1^T > 0 likely.
        let b1 = c1.transpose() * (RMat::identity(m, m) * uniform(rng, 0.3, 1.5)) + randn(rng, n, m) * 0.3;
        let Ok(plant) = UncertainPlant::new(a, b1, b2, c1) else { continue };
        let Ok(af) = af_matrix(&plant) else { continue };
        if plant.c1b2_condition() > 1e4 {
            continue;
        }
        let abscissa = riccati_synth::numlin::eigenvalues(&to_complex(&af))
            .unwrap()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if abscissa > 0.05 {
            return plant;
        }
    }
}

/// Random `[[X1, X2], [X2#, X1#]]` with `X1` r x c and `X2` scaled by `cross`.
pub fn doubled_random(rng: &mut ChaCha8Rng, r: usize, c: usize, cross: f64) -> CMat {
    let x1 = randn_c(rng, r, c);
    let x2 = randn_c(rng, r, c) * Complex64::new(cross, 0.0);
    riccati_synth::qlin::doubled(&x1, &x2)
}

/// Random doubled-up plant with `modes` modes, one field per channel except
/// for a two-field performance output.
pub fn quantum_plant(rng: &mut ChaCha8Rng, modes: usize, disturbance: f64) -> riccati_synth::coherent_hinf::QuantumPlant {
    let shift = riccati_synth::qlin::doubled(
        &(CMat::identity(modes, modes) * Complex64::new(uniform(rng, 0.2, 1.5), 0.0)),
        &CMat::zeros(modes, modes),
    );
    let f = doubled_random(rng, modes, modes, 0.3) * Complex64::new(0.6, 0.0) - shift;
    let k = Complex64::new(disturbance, 0.0);
    riccati_synth::coherent_hinf::QuantumPlant::new(
        f,
        doubled_random(rng, modes, 1, 0.3),
        doubled_random(rng, modes, 1, 0.3) * k,
        doubled_random(rng, modes, 1, 0.3),
        doubled_random(rng, 2, modes, 0.3) * k,
        doubled_random(rng, 1, modes, 0.3),
        doubled_random(rng, 2, 1, 0.3),
        doubled_random(rng, 1, 1, 0.3),
        doubled_random(rng, 1, 1, 0.3),
    )
    .unwrap()
}

/// Model file text in the CLI input format.
pub fn model_json(kind: &str, matrices: &[(&str, &CMat)], parameters: &[(&str, f64)]) -> String {
    use serde_json::{json, Map, Value};
    let mut mats = Map::new();
    for (name, m) in matrices {
        let rows: Vec<Value> = (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| {
                            let z = m[(i, j)];
                            if z.im == 0.0 { json!(z.re) } else { json!([z.re, z.im]) }
                        })
                        .collect(),
                )
            })
            .collect();
        mats.insert(name.to_string(), Value::Array(rows));
    }
    let params: Map<String, Value> = parameters.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    serde_json::to_string_pretty(&json!({
        "schema_version": "1",
        "kind": kind,
        "matrices": mats,
        "parameters": params,
    }))
    .unwrap()
}

pub fn real_ss_json(sys: &RealStateSpace) -> String {
    let (a, b, c, d) = (to_complex(&sys.a), to_complex(&sys.b), to_complex(&sys.c), to_complex(&sys.d));
    model_json("real_ss", &[("A", &a), ("B", &b), ("C", &c), ("D", &d)], &[])
}

/// `vec(A X + X B) = (I (x) A + B^T (x) I) vec(X)` solved densely.
pub fn kronecker_sylvester(a: &CMat, b: &CMat, rhs: &CMat) -> CMat {
    let (m, n) = (a.nrows(), b.nrows());
    let mut big = CMat::zeros(m * n, m * n);
    for j in 0..n {
        for i in 0..m {
            let row = j * m + i;
            for k in 0..m {
                big[(row, j * m + k)] += a[(i, k)];
            }
            for l in 0..n {
                big[(row, l * m + i)] += b[(l, j)];
            }
        }
    }
    let v = DMatrix::from_fn(m * n, 1, |r, _| rhs[(r % m, r / m)]);
    let x = big.lu().solve(&v).unwrap();
    DMatrix::from_fn(m, n, |i, j| x[(j * m + i, 0)])
}
