//! H-infinity norm by bisection on the level `gamma`, using the
//! imaginary-axis eigenvalues of the gamma-Hamiltonian as the test.

use num_complex::Complex64;

use super::schur::schur_raw;
use super::{
    block2, inverse, sigma_max, spectral_abscissa, transfer_eval, ComplexStateSpace,
    LinalgError, Tolerances, ABS_FLOOR,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HinfNorm {
    pub value: f64,
    /// Frequency (rad/s) at which the best lower bound was attained.
    pub peak_frequency: f64,
    /// Certified bracket `[lower, upper]`.
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

pub fn hinf_norm(sys: &ComplexStateSpace) -> Result<HinfNorm, LinalgError> {
    hinf_norm_with(sys, &Tolerances::default())
}

fn sigma_at(sys: &ComplexStateSpace, omega: f64) -> f64 {
    match transfer_eval(sys, Complex64::new(0.0, omega)) {
        Ok(g) => sigma_max(&g),
        Err(_) => 0.0,
    }
}

/// Imaginary parts of the gamma-Hamiltonian eigenvalues lying (numerically)
/// on the imaginary axis.
fn axis_frequencies(sys: &ComplexStateSpace, gamma: f64) -> Result<Vec<f64>, LinalgError> {
    let (a, b, c, d) = (&sys.a, &sys.b, &sys.c, &sys.d);
    let m = b.ncols();
    let p = c.nrows();
    let mut r = -(d.adjoint() * d);
    for i in 0..m {
        r[(i, i)] += Complex64::new(gamma * gamma, 0.0);
    }
    let r_inv = inverse(&r)?;
    let mut s = d * &r_inv * d.adjoint();
    for i in 0..p {
        s[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let a_h = a + b * &r_inv * d.adjoint() * c;
    let h = block2(
        &a_h,
        &(b * &r_inv * b.adjoint()),
        &(-(c.adjoint() * s * c)),
        &(-a_h.adjoint()),
    );
    let scale = h.norm().max(ABS_FLOOR);
    let (_, t) = schur_raw(&h)?;
    let mut freqs: Vec<f64> = (0..t.nrows())
        .map(|i| t[(i, i)])
        .filter(|z| z.re.abs() <= 1e-6 * scale.max(z.norm()))
        .map(|z| z.im)
        .collect();
    freqs.sort_by(f64::total_cmp);
    Ok(freqs)
}

/// `sup_w sigma_max(C (iw - A)^-1 B + D)` to relative accuracy `tol.hinf`.
///
/// Each step tests the midpoint level; when the Hamiltonian has axis
/// eigenvalues the gain is evaluated at those frequencies and their
/// midpoints, so the lower end of the bracket is always an attained value.
pub fn hinf_norm_with(sys: &ComplexStateSpace, tol: &Tolerances) -> Result<HinfNorm, LinalgError> {
    let abscissa = if sys.states() == 0 { f64::NEG_INFINITY } else { spectral_abscissa(&sys.a)? };
    if abscissa >= -1e-12 * sys.a.norm().max(ABS_FLOOR) {
        return Err(LinalgError::UnstableSystem { abscissa });
    }

    let d_gain = sigma_max(&sys.d);
    let mut lower = d_gain;
    let mut peak = f64::INFINITY;
    let consider = |omega: f64, lower: &mut f64, peak: &mut f64| {
        let s = sigma_at(sys, omega);
        if s > *lower {
            *lower = s;
            *peak = omega;
        }
    };
    consider(0.0, &mut lower, &mut peak);
    if sys.states() > 0 {
        for z in super::eigenvalues(&sys.a)? {
            for omega in [z.im, z.norm(), -z.norm()] {
                consider(omega, &mut lower, &mut peak);
            }
        }
    }
    if sys.b.norm() == 0.0 || sys.c.norm() == 0.0 || sys.states() == 0 {
        return Ok(HinfNorm {
            value: d_gain,
            peak_frequency: f64::INFINITY,
            lower: d_gain,
            upper: d_gain,
            iterations: 0,
        });
    }
    if lower == 0.0 {
        lower = ABS_FLOOR;
    }

    let mut iterations = 0;
    let mut upper = 2.0 * lower;
    // Grow the upper end until the level is not attained.
    loop {
        iterations += 1;
        if iterations > 200 {
            return Err(LinalgError::ConvergenceFailure { iterations });
        }
        let freqs = axis_frequencies(sys, upper)?;
        probe(sys, &freqs, &mut lower, &mut peak);
        if lower < upper {
            break;
        }
        upper = 2.0 * lower;
    }

    while upper - lower > 0.25 * tol.hinf * lower {
        iterations += 1;
        if iterations > 400 {
            return Err(LinalgError::ConvergenceFailure { iterations });
        }
        let gamma = 0.5 * (lower + upper);
        let freqs = axis_frequencies(sys, gamma)?;
        probe(sys, &freqs, &mut lower, &mut peak);
        if lower < gamma {
            upper = gamma;
        }
    }
    Ok(HinfNorm {
        value: 0.5 * (lower + upper),
        peak_frequency: peak.abs(),
        lower,
        upper,
        iterations,
    })
}

fn probe(sys: &ComplexStateSpace, freqs: &[f64], lower: &mut f64, peak: &mut f64) {
    let mut candidates: Vec<f64> = freqs.to_vec();
    candidates.extend(freqs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    for omega in candidates {
        let s = sigma_at(sys, omega);
        if s > *lower {
            *lower = s;
            *peak = omega;
        }
    }
}
