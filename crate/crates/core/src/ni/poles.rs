//! Eigenvalue clusters of `A` and Laurent coefficients of `C (sI - A)^-1 B`
//! around them.

use num_complex::Complex64;

use crate::numlin::{schur, spectral_projector, CMat, LinalgError, ABS_FLOOR};

/// Eigenvalues closer than this (relative to `|A|_F`) are merged. Defective
/// eigenvalues split by roughly `eps^(1/k)` for a Jordan block of size `k`.
const CLUSTER_RADIUS: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PoleCluster {
    pub centroid: Complex64,
    pub members: Vec<Complex64>,
}

impl PoleCluster {
    fn contains(&self, z: Complex64, slack: f64) -> bool {
        let spread = self
            .members
            .iter()
            .map(|m| (m - self.centroid).norm())
            .fold(0.0, f64::max);
        (z - self.centroid).norm() <= 1.01 * spread + slack
    }
}

pub(crate) fn pole_clusters(a: &CMat) -> Result<Vec<PoleCluster>, LinalgError> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let radius = CLUSTER_RADIUS * a.norm().max(ABS_FLOOR);
    let mut values = schur(a)?.eigenvalues();
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for z in values {
        let hit = clusters
            .iter()
            .position(|c| c.iter().any(|m| (m - z).norm() <= radius));
        match hit {
            Some(i) => clusters[i].push(z),
            None => clusters.push(vec![z]),
        }
    }
    Ok(clusters
        .into_iter()
        .map(|members| {
            let sum: Complex64 = members.iter().sum();
            PoleCluster {
                centroid: sum / members.len() as f64,
                members,
            }
        })
        .collect())
}

/// Coefficients `C N^k Pi B` for `k = 0..size`, where `Pi` projects onto the
/// cluster's invariant subspace and `N = (A - center) Pi`. The k-th entry
/// multiplies `(s - center)^-(k+1)` in the principal part.
pub(crate) struct Laurent {
    pub coefficients: Vec<CMat>,
    /// Scale against which each coefficient is judged to vanish.
    pub scales: Vec<f64>,
}

impl Laurent {
    /// Pole order: one plus the index of the last non-negligible coefficient.
    pub fn order(&self, rel: f64) -> usize {
        self.coefficients
            .iter()
            .zip(&self.scales)
            .rposition(|(c, s)| c.norm() > rel * s)
            .map_or(0, |k| k + 1)
    }
}

pub(crate) fn laurent(
    a: &CMat,
    b: &CMat,
    c: &CMat,
    cluster: &PoleCluster,
    center: Complex64,
) -> Result<Laurent, LinalgError> {
    let n = a.nrows();
    let slack = 1e-12 * a.norm().max(ABS_FLOOR);
    let (pi, dim) = spectral_projector(a, |z| cluster.contains(z, slack))?;
    debug_assert_eq!(dim, cluster.members.len());
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= center;
    }
    let nil = &shifted * &pi;
    let base = c.norm() * b.norm() * pi.norm().max(1.0);
    let anorm = a.norm().max(ABS_FLOOR);
    let mut coefficients = Vec::with_capacity(dim);
    let mut scales = Vec::with_capacity(dim);
    let mut power = pi.clone();
    for k in 0..dim {
        coefficients.push(c * &power * b);
        scales.push((base * anorm.powi(k as i32)).max(ABS_FLOOR));
        power = &nil * power;
    }
    Ok(Laurent { coefficients, scales })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn cm(rows: usize, cols: usize, data: &[f64]) -> CMat {
        DMatrix::from_row_slice(rows, cols, data).map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn jordan_block_is_one_cluster() {
        // Similarity-transformed double integrator keeps a single cluster at 0.
        let t = cm(2, 2, &[1.0, 2.0, 0.5, 3.0]);
        let a = &t * cm(2, 2, &[0.0, 1.0, 0.0, 0.0]) * t.clone().try_inverse().unwrap();
        let clusters = pole_clusters(&a).unwrap();
        assert_eq!(clusters.len(), 1);
        assert!(clusters[0].centroid.norm() < 1e-12);
    }

    #[test]
    fn double_integrator_has_order_two() {
        let a = cm(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = cm(2, 1, &[0.0, 1.0]);
        let c = cm(1, 2, &[1.0, 0.0]);
        let cl = &pole_clusters(&a).unwrap()[0];
        let l = laurent(&a, &b, &c, cl, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(l.order(1e-7), 2);
        assert!((l.coefficients[1][(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn oscillator_residue() {
        // 1 / (s^2 + 1): residue at i is 1 / (2i).
        let a = cm(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let b = cm(2, 1, &[0.0, 1.0]);
        let c = cm(1, 2, &[1.0, 0.0]);
        let clusters = pole_clusters(&a).unwrap();
        let upper = clusters.iter().find(|c| c.centroid.im > 0.0).unwrap();
        let l = laurent(&a, &b, &c, upper, Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(l.order(1e-7), 1);
        assert!((l.coefficients[0][(0, 0)] - Complex64::new(0.0, -0.5)).norm() < 1e-12);
    }
}
