//! Minimum-volume enclosing ellipsoid.
//!
//! Khachiyan's barycentric coordinate ascent on the lifted `(d + 1)`
//! formulation with Todd-Yildirim away steps, run on a growing active set:
//! the solver works on extreme points first and only touches the full cloud
//! to look for violators. With lifted points `q = (p, 1)` and design weights
//! `u`, `X(u) = sum u_i q_i q_i^T` and `w_i = q_i^T X^-1 q_i`; optimality is
//! `max_i w_i <= (d + 1)(1 + gap)`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, SVector, SymmetricEigen, Vector2};

use super::Ellipsoid;
use crate::error::{Error, Result};
use crate::kinematics::{Mat3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MveeOptions {
    /// Allowed excess of the quadratic form over 1 at any input point.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MveeOptions {
    fn default() -> Self {
        MveeOptions {
            tol: 1e-7,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub iterations: usize,
    /// `max_i w_i / (d + 1) - 1` at termination.
    pub duality_gap: f64,
    /// Share of input points with quadratic form at most `1 + tol`.
    pub contained_fraction: f64,
    /// Points that ever entered the active set.
    pub active_points: usize,
}

/// Relative eigenvalue threshold for counting affine rank.
const RANK_TOL: f64 = 1e-10;
const RIDGE: f64 = 1e-12;
/// Violators added to the active set per round.
const ADD_PER_ROUND: usize = 64;
/// Loose tolerance used while the active set is still growing.
const COARSE_EPS: f64 = 1e-3;
/// First-order steps between Newton attempts.
const NEWTON_EVERY: usize = 4;
/// Largest support the Newton step is tried on.
const NEWTON_MAX_SUPPORT: usize = 96;

/// Fits the MVEE of a 3-D cloud. Coplanar or smaller clouds fail with
/// [`Error::DegenerateCloud`].
pub fn mvee_fit(points: &[Vec3], opts: &MveeOptions) -> Result<(Ellipsoid, FitReport)> {
    let fit = khachiyan::<3, 4>(points, opts, None)?;
    let ellipsoid = Ellipsoid::from_shape(fit.center, fit.shape)?;
    let report = fit.report();
    if fit.exhausted {
        return Err(Error::MaxIterExceeded {
            ellipsoid: alloc::boxed::Box::new(ellipsoid),
            report,
        });
    }
    Ok((ellipsoid, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceFit {
    pub ellipsoid: Ellipsoid,
    pub report: FitReport,
    /// The cloud was planar and fitted in its plane.
    pub planar: bool,
}

/// MVEE of a workspace cloud, falling back to an in-plane fit for planar
/// clouds. The out-of-plane semi-axis of a planar fit is `min_thickness`.
pub fn fit_workspace(points: &[Vec3], opts: &MveeOptions, min_thickness: f64) -> Result<WorkspaceFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateCloud {
            rank: affine_rank3(points),
            dim: 3,
        });
    }
    let (mean, eig) = scatter_eigen(points);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = eig.eigenvalues[order[0]];
    if eig.eigenvalues[order[2]] > RANK_TOL * top {
        let fit = khachiyan::<3, 4>(points, opts, Some(3))?;
        let ellipsoid = Ellipsoid::from_shape(fit.center, fit.shape)?;
        let report = fit.report();
        if fit.exhausted {
            return Err(Error::MaxIterExceeded {
                ellipsoid: alloc::boxed::Box::new(ellipsoid),
                report,
            });
        }
        return Ok(WorkspaceFit {
            ellipsoid,
            report,
            planar: false,
        });
    }
    let e1: Vec3 = eig.eigenvectors.column(order[0]).into();
    let e2: Vec3 = eig.eigenvectors.column(order[1]).into();
    let normal: Vec3 = eig.eigenvectors.column(order[2]).into();
    let flat: Vec<Vector2<f64>> = points
        .iter()
        .map(|p| Vector2::new((p - mean).dot(&e1), (p - mean).dot(&e2)))
        .collect();
    let fit = khachiyan::<2, 3>(&flat, opts, None)?;
    let basis = nalgebra::Matrix3x2::from_columns(&[e1, e2]);
    let center = mean + basis * fit.center;
    let shape = basis * fit.shape * basis.transpose()
        + normal * normal.transpose() / (min_thickness * min_thickness);
    let ellipsoid = Ellipsoid::from_shape(center, shape)?;
    let report = fit.report();
    if fit.exhausted {
        return Err(Error::MaxIterExceeded {
            ellipsoid: alloc::boxed::Box::new(ellipsoid),
            report,
        });
    }
    Ok(WorkspaceFit {
        ellipsoid,
        report,
        planar: true,
    })
}

struct Fit<const D: usize> {
    center: SVector<f64, D>,
    shape: SMatrix<f64, D, D>,
    iterations: usize,
    gap: f64,
    active: usize,
    exhausted: bool,
    /// Points within the tolerance bound, out of `total`.
    contained: usize,
    total: usize,
}

impl<const D: usize> Fit<D> {
    fn report(&self) -> FitReport {
        FitReport {
            iterations: self.iterations,
            duality_gap: self.gap,
            contained_fraction: self.contained as f64 / self.total as f64,
            active_points: self.active,
        }
    }
}

fn scatter_eigen(points: &[Vec3]) -> (Vec3, SymmetricEigen<f64, nalgebra::U3>) {
    let n = points.len().max(1) as f64;
    let mean = points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n;
    let mut s = Mat3::zeros();
    for p in points {
        let d = p - mean;
        s += d * d.transpose();
    }
    (mean, SymmetricEigen::new(s / n))
}

fn affine_rank3(points: &[Vec3]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let (_, eig) = scatter_eigen(points);
    let top = eig.eigenvalues.max();
    if !(top > 0.0) {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&l| l > RANK_TOL * top).count()
}

fn affine_rank<const D: usize>(points: &[SVector<f64, D>]) -> usize {
    let lifted: Vec<Vec3> = points
        .iter()
        .map(|p| {
            let mut v = Vec3::zeros();
            for i in 0..D.min(3) {
                v[i] = p[i];
            }
            v
        })
        .collect();
    affine_rank3(&lifted)
}

fn lift<const D: usize, const L: usize>(p: &SVector<f64, D>) -> SVector<f64, L> {
    let mut q = SVector::<f64, L>::repeat(1.0);
    for i in 0..D {
        q[i] = p[i];
    }
    q
}

fn invert<const L: usize>(x: &SMatrix<f64, L, L>) -> Option<SMatrix<f64, L, L>> {
    x.try_inverse()
        .or_else(|| (x + SMatrix::<f64, L, L>::identity() * RIDGE).try_inverse())
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
}

/// Directions whose extreme points seed the active set: coordinate axes,
/// diagonals and the principal axes of the cloud.
fn seed_directions<const D: usize>(points: &[SVector<f64, D>]) -> Vec<SVector<f64, D>> {
    let mut dirs = Vec::new();
    for i in 0..D {
        let mut e = SVector::<f64, D>::zeros();
        e[i] = 1.0;
        dirs.push(e);
    }
    for mask in 0..(1usize << (D - 1)) {
        let mut v = SVector::<f64, D>::repeat(1.0);
        for i in 1..D {
            if mask & (1 << (i - 1)) != 0 {
                v[i] = -1.0;
            }
        }
        dirs.push(v);
    }
    if D <= 3 {
        let mut s = Matrix3::<f64>::zeros();
        for p in points {
            for i in 0..D {
                for j in 0..D {
                    s[(i, j)] += p[i] * p[j];
                }
            }
        }
        let eig = SymmetricEigen::new(s);
        for k in 0..3 {
            let mut v = SVector::<f64, D>::zeros();
            for i in 0..D {
                v[i] = eig.eigenvectors[(i, k)];
            }
            if v.norm() > 0.5 {
                dirs.push(v);
            }
        }
    }
    dirs
}

fn initial_active<const D: usize>(points: &[SVector<f64, D>]) -> Vec<usize> {
    let mut active = Vec::new();
    for dir in seed_directions(points) {
        let (mut lo, mut hi) = (0usize, 0usize);
        let (mut vlo, mut vhi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (i, p) in points.iter().enumerate() {
            let v = p.dot(&dir);
            if v < vlo {
                vlo = v;
                lo = i;
            }
            if v > vhi {
                vhi = v;
                hi = i;
            }
        }
        active.push(lo);
        active.push(hi);
    }
    active.sort_unstable();
    active.dedup();
    let subset: Vec<SVector<f64, D>> = active.iter().map(|&i| points[i]).collect();
    if affine_rank(&subset) < D {
        return (0..points.len()).collect();
    }
    active
}

fn log_det<const L: usize>(x: &SMatrix<f64, L, L>) -> Option<f64> {
    let chol = x.cholesky()?;
    Some(2.0 * chol.l_dirty().diagonal().iter().map(|d| libm::log(*d)).sum::<f64>())
}

/// Newton step for `log det X(u)` over the weights currently in the support,
/// keeping their sum fixed. Once the first-order steps have found the
/// support this converges quadratically. Returns whether a step was taken.
fn newton_step<const L: usize>(
    lifted: &[SVector<f64, L>],
    active: &[usize],
    u: &mut [f64],
    xinv: &SMatrix<f64, L, L>,
    omega: &[f64],
    x: &SMatrix<f64, L, L>,
) -> bool {
    let support: Vec<usize> = (0..active.len()).filter(|&t| u[t] > 0.0).collect();
    let s = support.len();
    if s < 2 || s > NEWTON_MAX_SUPPORT {
        return false;
    }
    let Some(current) = log_det(x) else {
        return false;
    };
    // KKT system of the quadratic model: M d - mu 1 = omega, 1^T d = 0, with
    // M_ab = (q_a^T X^-1 q_b)^2 the negated Hessian.
    let y: Vec<SVector<f64, L>> = support.iter().map(|&t| xinv * lifted[active[t]]).collect();
    let mut kkt = DMatrix::<f64>::zeros(s + 1, s + 1);
    let mut rhs = DVector::<f64>::zeros(s + 1);
    for a in 0..s {
        let qa = &lifted[active[support[a]]];
        for b in a..s {
            let v = qa.dot(&y[b]);
            kkt[(a, b)] = v * v;
            kkt[(b, a)] = v * v;
        }
        kkt[(a, s)] = -1.0;
        kkt[(s, a)] = 1.0;
        rhs[a] = omega[support[a]];
    }
    // M has rank at most L(L+1)/2; a tiny ridge keeps larger supports solvable.
    let ridge = 1e-10 * (0..s).map(|a| kkt[(a, a)]).sum::<f64>() / s as f64;
    for a in 0..s {
        kkt[(a, a)] += ridge;
    }
    let Some(step) = kkt.lu().solve(&rhs) else {
        return false;
    };
    let mut t_max = 1.0f64;
    for (a, &t) in support.iter().enumerate() {
        if step[a] < 0.0 {
            t_max = t_max.min(u[t] / -step[a]);
        }
    }
    if !(t_max > 0.0) {
        return false;
    }
    let mut trial = u.to_vec();
    let mut t = t_max;
    for _ in 0..6 {
        for (a, &i) in support.iter().enumerate() {
            let v = u[i] + t * step[a];
            trial[i] = if v <= 1e-14 { 0.0 } else { v };
        }
        let total: f64 = trial.iter().sum();
        let mut xt = SMatrix::<f64, L, L>::zeros();
        for (&i, w) in active.iter().zip(trial.iter_mut()) {
            *w /= total;
            if *w > 0.0 {
                xt += lifted[i] * lifted[i].transpose() * *w;
            }
        }
        if log_det(&xt).is_some_and(|v| v > current) {
            u.copy_from_slice(&trial);
            return true;
        }
        t *= 0.5;
    }
    false
}

/// `known_rank` skips the rank check when the caller has already done it.
fn khachiyan<const D: usize, const L: usize>(
    points: &[SVector<f64, D>],
    opts: &MveeOptions,
    known_rank: Option<usize>,
) -> Result<Fit<D>> {
    debug_assert_eq!(L, D + 1);
    let n = points.len();
    let rank = known_rank.unwrap_or_else(|| affine_rank(points));
    if n < L || rank < D {
        return Err(Error::DegenerateCloud { rank, dim: D });
    }
    // Work in centred, unit-scaled coordinates.
    let mean = points.iter().fold(SVector::<f64, D>::zeros(), |a, p| a + p) / n as f64;
    let scale = points.iter().map(|p| (p - mean).amax()).fold(0.0, f64::max);
    let norm: Vec<SVector<f64, D>> = points.iter().map(|p| (p - mean) / scale).collect();
    let lifted: Vec<SVector<f64, L>> = norm.iter().map(lift::<D, L>).collect();

    let lf = L as f64;
    // w <= L + D * tol  <=>  quadratic form <= 1 + tol.
    let eps = D as f64 * opts.tol / lf;
    let degenerate = || Error::DegenerateCloud { rank, dim: D };

    let mut active = initial_active(&norm);
    let mut u = alloc::vec![1.0 / active.len() as f64; active.len()];
    let mut in_active = alloc::vec![false; n];
    for &i in &active {
        in_active[i] = true;
    }
    let mut omega = Vec::with_capacity(active.len());
    let mut iterations = 0usize;
    let mut exhausted = false;
    let mut since_newton = 0usize;
    // Early rounds only need to locate the extreme points; converge loosely
    // until no point violates the loose bound, then tighten.
    let mut round_eps = eps.max(COARSE_EPS);
    let mut outside_max = f64::NEG_INFINITY;
    let mut contained = 0usize;
    let mut violators: Vec<(f64, usize)> = Vec::new();

    let xinv = loop {
        let mut x = SMatrix::<f64, L, L>::zeros();
        for (&i, &w) in active.iter().zip(&u) {
            if w > 0.0 {
                let q = &lifted[i];
                x += q * q.transpose() * w;
            }
        }
        let xinv = invert(&x).ok_or_else(degenerate)?;
        omega.clear();
        omega.extend(active.iter().map(|&i| lifted[i].dot(&(xinv * lifted[i]))));
        let (mut j, mut k) = (0usize, usize::MAX);
        for t in 0..active.len() {
            if omega[t] > omega[j] {
                j = t;
            }
            if u[t] > 0.0 && (k == usize::MAX || omega[t] < omega[k]) {
                k = t;
            }
        }
        let eps_plus = omega[j] / lf - 1.0;
        let eps_minus = 1.0 - omega[k] / lf;

        if eps_plus <= round_eps {
            // Converged on the active set; look for violators elsewhere.
            violators.clear();
            outside_max = f64::NEG_INFINITY;
            contained = 0;
            let bound = lf * (1.0 + round_eps);
            let final_bound = lf * (1.0 + eps);
            for i in 0..n {
                if in_active[i] {
                    continue;
                }
                let w = lifted[i].dot(&(xinv * lifted[i]));
                outside_max = outside_max.max(w);
                if w <= final_bound {
                    contained += 1;
                }
                if w > bound {
                    violators.push((w, i));
                }
            }
            if violators.is_empty() {
                if round_eps > eps {
                    round_eps = eps;
                    continue;
                }
                break xinv;
            }
            violators.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for &(_, i) in violators.iter().take(ADD_PER_ROUND) {
                active.push(i);
                in_active[i] = true;
                u.push(0.0);
            }
            continue;
        }
        if iterations >= opts.max_iter {
            exhausted = true;
            break xinv;
        }
        iterations += 1;
        since_newton += 1;
        if since_newton >= NEWTON_EVERY {
            since_newton = 0;
            if newton_step(&lifted, &active, &mut u, &xinv, &omega, &x) {
                continue;
            }
        }
        if eps_plus > eps_minus {
            let w = omega[j];
            let lambda = (w - lf) / (lf * (w - 1.0));
            for v in u.iter_mut() {
                *v *= 1.0 - lambda;
            }
            u[j] += lambda;
        } else {
            let w = omega[k];
            let drop = u[k] / (1.0 - u[k]);
            let lambda = ((lf - w) / (lf * (w - 1.0))).min(drop);
            for v in u.iter_mut() {
                *v *= 1.0 + lambda;
            }
            if lambda >= drop {
                u[k] = 0.0;
            } else {
                u[k] -= lambda;
            }
        }
    };

    // Quadratic forms of the final weights: the active set is fresh, points
    // outside it come from the last scan unless the iteration cap cut in.
    if exhausted {
        outside_max = f64::NEG_INFINITY;
        contained = 0;
        for i in (0..n).filter(|&i| !in_active[i]) {
            let w = lifted[i].dot(&(xinv * lifted[i]));
            outside_max = outside_max.max(w);
            if w <= lf * (1.0 + eps) {
                contained += 1;
            }
        }
    }
    let final_bound = lf * (1.0 + eps);
    let mut omega_max = outside_max;
    for &i in &active {
        let w = lifted[i].dot(&(xinv * lifted[i]));
        omega_max = omega_max.max(w);
        if w <= final_bound {
            contained += 1;
        }
    }
    let gap = omega_max / lf - 1.0;

    let mut center = SVector::<f64, D>::zeros();
    let mut second = SMatrix::<f64, D, D>::zeros();
    for (&i, &w) in active.iter().zip(&u) {
        center += norm[i] * w;
        second += norm[i] * norm[i].transpose() * w;
    }
    let cov = second - center * center.transpose();
    let shape_norm = cov
        .try_inverse()
        .ok_or_else(degenerate)?
        / D as f64;
    Ok(Fit {
        center: mean + center * scale,
        shape: shape_norm / (scale * scale),
        iterations,
        gap,
        active: active.len(),
        exhausted,
        contained,
        total: n,
    })
}
