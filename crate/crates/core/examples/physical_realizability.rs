//! Recover a commutation-preserving realization of a stripped quantum system.

use nalgebra::DMatrix;
use num_complex::Complex64;
use riccati_synth::qlin::{physreal_are_test, physreal_construct, PhysRealSpec};

fn main() {
    let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.6]);
    let lambda = DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.7, 0.1),
        Complex64::new(-0.3, 0.4),
        Complex64::new(0.2, -0.5),
        Complex64::new(0.9, 0.0),
    ]);
    let spec = PhysRealSpec { r, lambda, n_y: 2 };
    let sys = physreal_construct(&spec).expect("construct");
    // Keep only the inputs that are not paired with outputs and apply a similarity.
    let t = DMatrix::from_row_slice(2, 2, &[1.5, 0.3, -0.2, 0.8]);
    let t_inv = t.clone().try_inverse().unwrap();
    let a = &t * &sys.a * &t_inv;
    let b_u = &t * sys.b.columns(2, sys.b.ncols() - 2);
    let c = &sys.c * &t_inv;
    match physreal_are_test(&a, &b_u, &c) {
        Ok(res) => {
            println!("X = {:.6}", res.x);
            println!("ARE residual {:.3e}, realizability residual {:.3e}", res.residual, res.pr_residual);
            println!("found from {:?} after {} starts", res.start, res.starts_tried);
        }
        Err(e) => println!("not realizable: {e}"),
    }
}
