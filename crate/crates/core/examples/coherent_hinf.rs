//! Coherent H-infinity controller for a one-mode plant with a two-field
//! performance output.

use nalgebra::DMatrix;
use num_complex::Complex64;
use riccati_synth::coherent_hinf::{synthesize_hinf, QuantumPlant};
use riccati_synth::qlin::doubled;

fn block(rows: usize, cols: usize, x1: &[f64], x2: &[f64]) -> DMatrix<Complex64> {
    let m = |v: &[f64]| DMatrix::from_fn(rows, cols, |i, j| Complex64::new(v[i * cols + j], 0.0));
    doubled(&m(x1), &m(x2))
}

fn main() {
    let f = doubled(
        &DMatrix::from_element(1, 1, Complex64::new(-1.0, 0.4)),
        &DMatrix::from_element(1, 1, Complex64::new(0.2, 0.0)),
    );
    let plant = QuantumPlant::new(
        f,
        block(1, 1, &[-0.6], &[0.1]),
        block(1, 1, &[0.3], &[0.0]),
        block(1, 1, &[-0.8], &[0.2]),
        block(2, 1, &[0.4, -0.3], &[-0.1, 0.0]),
        block(1, 1, &[0.9], &[0.1]),
        block(2, 1, &[0.2, 1.0], &[0.0, 0.1]),
        block(1, 1, &[0.5], &[0.1]),
        block(1, 1, &[1.0], &[0.0]),
    )
    .expect("doubled-up plant");
    match synthesize_hinf(&plant, 1.0) {
        Ok(design) => {
            let v = &design.verification;
            println!("X = {:.4}", design.riccatis.x.map(|z| z.re));
            println!("rho(XY) = {:.4e}", design.controller.rho_xy);
            println!("closed-loop abscissa {:.4}", v.abscissa);
            if let Some(n) = &v.norm {
                println!("closed-loop H-infinity norm {:.6} at {:.4} rad/s", n.value, n.peak_frequency);
            }
            println!("verified = {}", v.verified);
        }
        Err(e) => println!("no controller: {e}"),
    }
}
