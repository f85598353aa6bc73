//! Stabilizing CARE solution for a double integrator.

use nalgebra::DMatrix;
use riccati_synth::numlin::{solve_care, to_complex};

fn main() {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let b = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let q = DMatrix::identity(2, 2);
    let r = DMatrix::identity(1, 1);
    let sol = solve_care(&to_complex(&a), &to_complex(&b), &to_complex(&q), &to_complex(&r)).expect("care");
    println!("X = {:.6}", sol.x.map(|z| z.re));
    println!("relative residual {:.3e}", sol.relative_residual);
    println!("closed-loop spectral abscissa {:.6}", sol.closed_loop_abscissa);
}
