//! State feedback that makes an uncertain plant NI.

use nalgebra::DMatrix;
use riccati_synth::ni_synth::{synthesize_ni_feedback, UncertainPlant};

fn main() {
    let a = DMatrix::from_row_slice(3, 3, &[-1.0, 0.5, 1.5, 2.0, 1.0, -0.5, -1.5, 0.5, 0.0]);
    let b1 = DMatrix::from_row_slice(3, 1, &[1.5, -0.5, 0.5]);
    let b2 = DMatrix::from_row_slice(3, 1, &[-1.0, -1.0, 0.5]);
    let c1 = DMatrix::from_row_slice(1, 3, &[1.5, -0.5, 1.5]);
    let plant = UncertainPlant::new(a, b1, b2, c1).expect("plant");
    match synthesize_ni_feedback(&plant) {
        Ok(res) => {
            println!("K = {:.6}", res.k);
            println!("closed loop {}", res.closed_loop_verdict.classification.label());
            println!("min eig(T - S) = {:.4e}, verified = {}", res.gap_min_eigenvalue, res.verified());
        }
        Err(e) => println!("synthesis failed: {e}"),
    }
}
