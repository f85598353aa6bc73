//! DC-gain test for positive feedback between an NI plant and an SNI uncertainty.

use riccati_synth::ni::{interconnection_stability, RealStateSpace};

fn main() {
    let m = RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0);
    for gain in [0.5, 1.0, 1.5] {
        let n = RealStateSpace::scalar(-2.0, 1.0, 2.0 * gain, 0.0);
        let r = interconnection_stability(&m, &n).expect("hypotheses hold");
        println!(
            "N(0) = {gain:.1}: lambda_max = {:.3}, stable = {}, closed loop Hurwitz = {}",
            r.lambda_max, r.stable, r.closed_loop_hurwitz
        );
    }
}
