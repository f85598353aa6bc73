use nalgebra::linalg::LU;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::physreal::theta;
use super::QlinError;
use crate::numlin::{
    eigenvalues, ordered_schur, real_part, singular_values, solve, to_complex, transfer_eval, CMat,
    ComplexStateSpace, RMat, ABS_FLOOR,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SkewAreOptions {
    pub seed: u64,
    pub random_starts: usize,
    pub max_iter: usize,
    /// Relative residual at which Newton stops.
    pub tol: f64,
    /// Cap on the invariant-subspace sign patterns tried.
    pub subspace_patterns: usize,
    /// `X` counts as singular when `sigma_min <= rcond_min * sigma_max`.
    pub rcond_min: f64,
    pub grid_points: usize,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub transfer_tol: f64,
}

impl Default for SkewAreOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            random_starts: 32,
            max_iter: 100,
            tol: 1e-10,
            subspace_patterns: 256,
            rcond_min: 1e-8,
            grid_points: 200,
            grid_lo: 1e-2,
            grid_hi: 1e2,
            transfer_tol: 1e-7,
        }
    }
}

/// Where the accepted Newton run started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StartKind {
    ScaledTheta { c: f64 },
    BlockDiagonal { larger_root: bool },
    InvariantSubspace { pattern: u64 },
    Random { index: usize },
}

/// Non-singular skew solution `X = T^T Theta T` and the physically
/// realizable system `(T A T^-1, T B_u, C T^-1)` with the added noise input
/// `B_v1 = Theta C^T Theta`.
#[derive(Debug, Clone)]
pub struct PhysRealResult {
    pub x: RMat,
    pub t: RMat,
    pub a: RMat,
    pub b_u: RMat,
    pub c: RMat,
    pub b_v1: RMat,
    /// Relative Riccati residual.
    pub residual: f64,
    /// `|X + X^T| / |X|`.
    pub skewness: f64,
    pub rcond: f64,
    pub transfer_error: f64,
    /// `|A Theta + Theta A^T + B_u Theta B_u^T + B_v1 Theta B_v1^T|`, relative.
    pub pr_residual: f64,
    pub start: StartKind,
    pub starts_tried: usize,
}

struct Problem {
    a: RMat,
    g: RMat,
    q: RMat,
}

impl Problem {
    fn residual(&self, x: &RMat) -> RMat {
        x * &self.g * x - self.a.transpose() * x - x * &self.a - &self.q
    }

    fn scale(&self, x: &RMat) -> f64 {
        let xgx = (x * &self.g * x).norm();
        let lin = (self.a.transpose() * x).norm() + (x * &self.a).norm();
        1f64.max(self.q.norm()).max(xgx).max(lin)
    }

    fn relative(&self, x: &RMat) -> f64 {
        self.residual(x).norm() / self.scale(x)
    }
}

fn upper(m: &RMat) -> Vec<f64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push(m[(i, j)]);
        }
    }
    v
}

fn from_upper(v: &[f64], n: usize) -> RMat {
    let mut m = RMat::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            m[(i, j)] = v[k];
            m[(j, i)] = -v[k];
            k += 1;
        }
    }
    m
}

fn skew(m: &RMat) -> RMat {
    (m - m.transpose()) * 0.5
}

/// Newton on the strictly upper entries with a backtracking line search.
fn newton(p: &Problem, x0: RMat, opts: &SkewAreOptions) -> (RMat, f64) {
    let n = p.a.nrows();
    let dim = n * (n - 1) / 2;
    let mut x = skew(&x0);
    let mut f = p.residual(&x);
    for _ in 0..opts.max_iter {
        let rel = f.norm() / p.scale(&x);
        if !rel.is_finite() || rel <= opts.tol {
            return (x, rel);
        }
        let rw = &p.g * &x - &p.a;
        let cv = &x * &p.g - p.a.transpose();
        let mut jac = RMat::zeros(dim, dim);
        let mut col = 0;
        for i in 0..n {
            for j in i + 1..n {
                let mut l = RMat::zeros(n, n);
                for c in 0..n {
                    l[(i, c)] += rw[(j, c)];
                    l[(j, c)] -= rw[(i, c)];
                    l[(c, j)] += cv[(c, i)];
                    l[(c, i)] -= cv[(c, j)];
                }
                jac.column_mut(col).copy_from_slice(&upper(&l));
                col += 1;
            }
        }
        let rhs = RMat::from_vec(dim, 1, upper(&f).iter().map(|v| -v).collect());
        let Some(step) = LU::new(jac).solve(&rhs) else {
            return (x, rel);
        };
        let delta = from_upper(step.as_slice(), n);
        let f_norm = f.norm();
        let mut t = 1.0;
        let mut accepted = false;
        while t >= 1e-6 {
            let trial = &x + &delta * t;
            let ft = p.residual(&trial);
            if ft.norm().is_finite() && ft.norm() < (1.0 - 1e-4 * t) * f_norm {
                x = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return (x, rel);
        }
    }
    let rel = p.relative(&x);
    (x, rel)
}

fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-14 * scale {
        return if b.abs() > 1e-14 * scale { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let s = disc.sqrt();
    let q = -0.5 * (b + b.signum() * s);
    let mut r = vec![q / a];
    if q != 0.0 {
        r.push(c / q);
    }
    r.sort_by(|x, y| x.total_cmp(y));
    r.dedup();
    r
}

/// Roots of the projection of the residual at `X = c K` onto `K`.
fn projected_roots(p: &Problem, k: &RMat) -> Vec<f64> {
    let a2 = (k * &p.g * k).dot(k);
    let a1 = -(p.a.transpose() * k + k * &p.a).dot(k);
    let a0 = -p.q.dot(k);
    real_roots(a2, a1, a0)
}

fn ansatz_starts(p: &Problem) -> Vec<(StartKind, RMat)> {
    let n = p.a.nrows();
    let th = theta(n);
    let mut out: Vec<(StartKind, RMat)> =
        projected_roots(p, &th).into_iter().map(|c| (StartKind::ScaledTheta { c }, &th * c)).collect();
    if n > 2 {
        let mut roots = Vec::new();
        for b in 0..n / 2 {
            let mut k = RMat::zeros(n, n);
            k[(2 * b, 2 * b + 1)] = 1.0;
            k[(2 * b + 1, 2 * b)] = -1.0;
            roots.push(projected_roots(p, &k));
        }
        for larger_root in [true, false] {
            let mut x = RMat::zeros(n, n);
            for (b, r) in roots.iter().enumerate() {
                let c = match (r.first(), r.last()) {
                    (Some(lo), Some(hi)) => {
                        if larger_root {
                            *hi
                        } else {
                            *lo
                        }
                    }
                    _ => 0.0,
                };
                x[(2 * b, 2 * b + 1)] = c;
                x[(2 * b + 1, 2 * b)] = -c;
            }
            out.push((StartKind::BlockDiagonal { larger_root }, x));
        }
    }
    out
}

/// Skew seeds `U21 U11^-1` from invariant subspaces of `[[-A, G], [Q, A^T]]`
/// that take one eigenvalue from each `+-lambda` pair.
fn subspace_starts(p: &Problem, cap: usize) -> Vec<(StartKind, RMat)> {
    let n = p.a.nrows();
    let z = to_complex(&RMat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => -p.a[(i, j)],
        (true, false) => p.g[(i, j - n)],
        (false, true) => p.q[(i - n, j)],
        (false, false) => p.a[(j - n, i - n)],
    }));
    let Ok(eigs) = eigenvalues(&z) else { return vec![] };
    let zn = z.norm().max(ABS_FLOOR);
    let axis = 1e-8 * zn;
    if eigs.iter().any(|e| e.re.abs() <= axis) {
        return vec![];
    }
    // Groups of right-half-plane eigenvalues closed under conjugation.
    let radius = 1e-6 * zn;
    let mut reps: Vec<Complex64> = Vec::new();
    for e in eigs.iter().filter(|e| e.re > 0.0) {
        let w = Complex64::new(e.re, e.im.abs());
        if !reps.iter().any(|r| (r - w).norm() <= radius) {
            reps.push(w);
        }
    }
    let groups = reps.len();
    if groups == 0 || groups > 63 {
        return vec![];
    }
    let full = (1u64 << groups) - 1;
    let mut patterns = vec![0, full];
    let mut bits = 1;
    while patterns.len() < cap && bits < full {
        patterns.push(bits);
        bits += 1;
    }
    patterns.truncate(cap);
    let mut out = Vec::new();
    for pattern in patterns {
        let select = |e: Complex64| {
            let w = if e.re > 0.0 { e } else { -e };
            let w = Complex64::new(w.re, w.im.abs());
            let g = reps
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - w).norm().total_cmp(&(b.1 - w).norm()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            let bit = pattern >> g & 1 == 1;
            if e.re > 0.0 {
                bit
            } else {
                !bit
            }
        };
        let Ok(s) = ordered_schur(&z, select) else { continue };
        if s.selected != n {
            continue;
        }
        let u11 = s.u.view((0, 0), (n, n)).into_owned();
        let u21 = s.u.view((n, 0), (n, n)).into_owned();
        let Ok(xt) = solve(&u11.transpose(), &u21.transpose()) else { continue };
        let x: CMat = xt.transpose();
        let im = x.map(|v| v.im).norm();
        if !im.is_finite() || im > 1e-6 * x.norm().max(1.0) {
            continue;
        }
        out.push((StartKind::InvariantSubspace { pattern }, skew(&real_part(&x))));
    }
    out
}

fn random_starts(p: &Problem, opts: &SkewAreOptions) -> Vec<(StartKind, RMat)> {
    let n = p.a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mag = (p.q.norm().max(1e-3) / p.g.norm().max(1e-3)).sqrt();
    (0..opts.random_starts)
        .map(|index| {
            let m = RMat::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
            (StartKind::Random { index }, skew(&m) * mag)
        })
        .collect()
}

fn check_dims(a: &RMat, b_u: &RMat, c: &RMat) -> Result<(usize, usize, usize), QlinError> {
    let n = a.nrows();
    let (n_u, n_y) = (b_u.ncols(), c.nrows());
    if a.ncols() != n || b_u.nrows() != n || c.ncols() != n {
        return Err(QlinError::DimensionMismatch(format!(
            "A is {}x{}, B_u is {}x{}, C is {}x{}",
            a.nrows(),
            a.ncols(),
            b_u.nrows(),
            b_u.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    if n == 0 || n % 2 != 0 || n_u % 2 != 0 || n_y % 2 != 0 {
        return Err(QlinError::DimensionMismatch(format!("{n} states, {n_u} inputs, {n_y} outputs; all must be even")));
    }
    Ok((n, n_u, n_y))
}

/// `X G X - A^T X - X A - Q` with `G = B_u Theta B_u^T` and `Q = C^T Theta C`.
pub fn skew_are_residual(x: &RMat, a: &RMat, b_u: &RMat, c: &RMat) -> Result<RMat, QlinError> {
    let (_, n_u, n_y) = check_dims(a, b_u, c)?;
    let p = Problem { a: a.clone(), g: b_u * theta(n_u) * b_u.transpose(), q: c.transpose() * theta(n_y) * c };
    Ok(p.residual(x))
}

pub fn physreal_are_test(a: &RMat, b_u: &RMat, c: &RMat) -> Result<PhysRealResult, QlinError> {
    physreal_are_test_with(a, b_u, c, &SkewAreOptions::default())
}

fn rcond(x: &RMat) -> f64 {
    let s = singular_values(&to_complex(x));
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Searches for a non-singular real skew-symmetric solution of the Riccati
/// equation and, if one is found, returns the physically realizable system.
pub fn physreal_are_test_with(
    a: &RMat,
    b_u: &RMat,
    c: &RMat,
    opts: &SkewAreOptions,
) -> Result<PhysRealResult, QlinError> {
    let (n, n_u, n_y) = check_dims(a, b_u, c)?;
    if a.iter().chain(b_u.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
        return Err(QlinError::Linalg(crate::numlin::LinalgError::NonFinite("physreal input")));
    }
    let (th, tu, ty) = (theta(n), theta(n_u), theta(n_y));
    let p = Problem { a: a.clone(), g: b_u * &tu * b_u.transpose(), q: c.transpose() * &ty * c };

    let mut starts = ansatz_starts(&p);
    starts.extend(subspace_starts(&p, opts.subspace_patterns));
    starts.extend(random_starts(&p, opts));

    let g_norm = p.g.norm();
    let natural = if g_norm > ABS_FLOOR { (a.norm() + (p.q.norm() * g_norm).sqrt()) / g_norm } else { 1.0 };
    let mut best = f64::INFINITY;
    let mut singular: Option<f64> = None;
    let mut found = None;
    for (i, (kind, x0)) in starts.iter().enumerate() {
        let (x, rel) = newton(&p, x0.clone(), opts);
        if !rel.is_finite() {
            continue;
        }
        best = best.min(rel);
        if rel > opts.tol {
            continue;
        }
        // Newton also converges to the trivial solution when Q = 0.
        let rc = if x.norm() <= opts.rcond_min * natural {
            0.0
        } else {
            rcond(&x)
        };
        if rc <= opts.rcond_min {
            singular = Some(singular.map_or(rc, |s: f64| s.max(rc)));
            continue;
        }
        found = Some((x, rel, rc, *kind, i + 1));
        break;
    }
    let Some((x, residual, rc, start, starts_tried)) = found else {
        if let Some(rcond) = singular {
            return Err(QlinError::SingularX { rcond });
        }
        return Err(QlinError::NoSkewSolutionFound { starts: starts.len(), best_residual: best });
    };

    let t = factor(&x)?;
    let t_inv = t.clone().try_inverse().ok_or(QlinError::SingularX { rcond: rc })?;
    let a_new = &t * a * &t_inv;
    let b_new = &t * b_u;
    let c_new = c * &t_inv;
    let b_v1 = &th * c_new.transpose() * &ty;
    let pr = &a_new * &th + &th * a_new.transpose() + &b_new * &tu * b_new.transpose() + &b_v1 * &ty * b_v1.transpose();
    let pr_scale = (a_new.norm() + b_new.norm().powi(2) + b_v1.norm().powi(2)).max(1.0);
    let transfer_error = transfer_mismatch(a, b_u, c, &a_new, &b_new, &c_new, opts)?;
    if transfer_error > opts.transfer_tol {
        return Err(QlinError::TransferMismatch { error: transfer_error });
    }
    Ok(PhysRealResult {
        skewness: (&x + x.transpose()).norm() / x.norm().max(ABS_FLOOR),
        x,
        t,
        a: a_new,
        b_u: b_new,
        c: c_new,
        b_v1,
        residual,
        rcond: rc,
        transfer_error,
        pr_residual: pr.norm() / pr_scale,
        start,
        starts_tried,
    })
}

/// `T` with `X = T^T Theta T`, from the Hermitian eigendecomposition of `iX`.
fn factor(x: &RMat) -> Result<RMat, QlinError> {
    let n = x.nrows();
    let ix = x.map(|v| Complex64::new(0.0, v));
    let eig = ix.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.0).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    if order.len() != n / 2 {
        return Err(QlinError::SingularX { rcond: rcond(x) });
    }
    let mut t = RMat::zeros(n, n);
    let root2 = 2f64.sqrt();
    for (k, &idx) in order.iter().enumerate() {
        let d = eig.eigenvalues[idx].sqrt();
        let u = eig.eigenvectors.column(idx);
        for r in 0..n {
            t[(2 * k, r)] = d * root2 * u[r].im;
            t[(2 * k + 1, r)] = d * root2 * u[r].re;
        }
    }
    let err = (t.transpose() * theta(n) * &t - x).norm();
    if err > 1e-8 * x.norm() {
        return Err(QlinError::SingularX { rcond: rcond(x) });
    }
    Ok(t)
}

fn transfer_mismatch(
    a: &RMat,
    b: &RMat,
    c: &RMat,
    a2: &RMat,
    b2: &RMat,
    c2: &RMat,
    opts: &SkewAreOptions,
) -> Result<f64, QlinError> {
    let s1 = ComplexStateSpace::strictly_proper(to_complex(a), to_complex(b), to_complex(c))?;
    let s2 = ComplexStateSpace::strictly_proper(to_complex(a2), to_complex(b2), to_complex(c2))?;
    let k = opts.grid_points.max(2);
    let (lo, hi) = (opts.grid_lo.ln(), opts.grid_hi.ln());
    let mut worst: f64 = 0.0;
    for i in 0..k {
        let w = (lo + (hi - lo) * i as f64 / (k - 1) as f64).exp();
        let s = Complex64::new(0.0, w);
        let (Ok(g1), Ok(g2)) = (transfer_eval(&s1, s), transfer_eval(&s2, s)) else { continue };
        worst = worst.max((&g1 - &g2).norm() / g1.norm().max(ABS_FLOOR));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_field_cavity_has_theta_multiples() {
        let (ku, kv): (f64, f64) = (1.0, 3.0);
        let a = RMat::identity(2, 2) * (-(ku + kv) / 2.0);
        let b = RMat::identity(2, 2) * -ku.sqrt();
        let c = RMat::identity(2, 2) * kv.sqrt();
        let res = physreal_are_test(&a, &b, &c).unwrap();
        let ratio = res.x[(0, 1)];
        assert!((ratio - 1.0).abs() < 1e-9 || (ratio - kv / ku).abs() < 1e-9, "{ratio}");
        assert!(res.residual <= 1e-10);
        assert!(res.pr_residual <= 1e-9);
        assert!(res.transfer_error <= 1e-7);
    }

    #[test]
    fn one_field_cavity_has_no_real_solution() {
        let a = RMat::identity(2, 2) * -0.5;
        let b = -RMat::identity(2, 2);
        let c = RMat::identity(2, 2);
        assert!(matches!(physreal_are_test(&a, &b, &c), Err(QlinError::NoSkewSolutionFound { .. })));
    }

    #[test]
    fn factor_reproduces_x() {
        let x = from_upper(&[0.3, -1.2, 0.7, 2.0, 0.1, -0.4], 4);
        let t = factor(&x).unwrap();
        assert!((t.transpose() * theta(4) * &t - &x).norm() < 1e-12);
    }

    #[test]
    fn upper_round_trip() {
        let v = [1.0, 2.0, 3.0];
        let m = from_upper(&v, 3);
        assert_eq!(upper(&m), v.to_vec());
        assert_eq!(m, -m.transpose());
    }

    #[test]
    fn odd_dimensions_rejected() {
        let a = RMat::identity(3, 3);
        let b = RMat::zeros(3, 2);
        let c = RMat::zeros(2, 3);
        assert!(matches!(physreal_are_test(&a, &b, &c), Err(QlinError::DimensionMismatch(_))));
    }
}
