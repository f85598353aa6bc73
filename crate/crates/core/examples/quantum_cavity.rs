//! QSDE and quadrature form of a detuned optical cavity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use riccati_synth::qlin::{build_qsde, quadrature_transform, QuantumSpec};

fn main() {
    let c = |x: f64| DMatrix::from_element(1, 1, Complex64::new(x, 0.0));
    let (detuning, kappa): (f64, f64) = (0.5, 2.0);
    let spec = QuantumSpec { m1: c(detuning), m2: c(0.0), n1: c(kappa.sqrt()), n2: c(0.0), s: c(1.0) };
    let sys = build_qsde(&spec).expect("valid spec");
    println!("F = {:.4}", sys.f);
    println!("G = {:.4}", sys.g);
    let quad = quadrature_transform(&sys).expect("doubled-up");
    println!("A = {:.4}", quad.a);
    println!("B = {:.4}", quad.b);
    println!("C = {:.4}", quad.c);
    println!("D = {:.4}", quad.d);
}
