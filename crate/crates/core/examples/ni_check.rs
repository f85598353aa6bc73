//! Classify a first-order lag, a lightly damped resonance and its negation.

use nalgebra::DMatrix;
use riccati_synth::ni::{ni_frequency_oracle, ni_riccati_test, FrequencyGrid, RealStateSpace};

fn main() {
    // 1 / (s^2 + 0.2 s + 4)
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0, -0.2]);
    let b = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let c = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let sys = RealStateSpace::strictly_proper(a, b, c).unwrap();
    let neg = RealStateSpace::new(sys.a.clone(), sys.b.clone(), -&sys.c, sys.d.clone()).unwrap();
    let lag = RealStateSpace::scalar(-1.0, 1.0, 1.0, 0.0);
    for (name, s) in [("lag", &lag), ("resonance", &sys), ("negated", &neg)] {
        let f = ni_frequency_oracle(s, &FrequencyGrid::default()).expect("frequency test");
        println!("{name}: frequency test {}", f.classification.label());
        match ni_riccati_test(s) {
            Ok(r) => println!("{name}: riccati test {}", r.classification.label()),
            Err(e) => println!("{name}: riccati test not applicable ({e})"),
        }
    }
}
