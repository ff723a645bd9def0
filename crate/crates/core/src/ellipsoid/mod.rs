//! Enclosing ellipsoids and the four ellipsoid-similarity metrics.
//!
//! An ellipsoid is `{p : (p - center)^T shape (p - center) <= 1}` with an SPD
//! `shape`. Semi-axes are sorted descending and `axes[i]` is the unit
//! direction of `semi_axes[i]`.

mod mvee;

pub use mvee::{fit_workspace, mvee_fit, FitReport, MveeOptions, WorkspaceFit};

use core::f64::consts::PI;

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::kinematics::{Mat3, Vec3};

/// Relative gap `(r1 - r2) / r1` below which the major axis is ambiguous.
pub const AXIS_TIE_TOL: f64 = 1e-9;
/// Floor applied to the oblateness before taking logarithms.
pub const OBL_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    pub center: Vec3,
    pub shape: Mat3,
    pub semi_axes: [f64; 3],
    pub axes: [Vec3; 3],
}

impl Ellipsoid {
    pub fn from_shape(center: Vec3, shape: Mat3) -> Result<Self> {
        let (semi_axes, axes) = axes_from_shape(&shape)?;
        Ok(Ellipsoid {
            center,
            shape,
            semi_axes,
            axes,
        })
    }

    /// Builds the shape matrix `sum_i a_i a_i^T / r_i^2` from axes; sorts them.
    pub fn from_axes(center: Vec3, semi_axes: [f64; 3], axes: [Vec3; 3]) -> Result<Self> {
        if semi_axes.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::NotSpd);
        }
        let mut shape = Mat3::zeros();
        for (r, a) in semi_axes.iter().zip(&axes) {
            let a = a.normalize();
            shape += a * a.transpose() / (r * r);
        }
        Ellipsoid::from_shape(center, shape)
    }

    pub fn sphere(center: Vec3, radius: f64) -> Result<Self> {
        Ellipsoid::from_axes(center, [radius; 3], [Vec3::x(), Vec3::y(), Vec3::z()])
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.semi_axes.iter().product::<f64>()
    }

    /// `(p - c)^T A (p - c)`; at most 1 inside.
    pub fn quadratic_form(&self, p: &Vec3) -> f64 {
        let d = p - self.center;
        d.dot(&(self.shape * d))
    }

    /// Unit direction of the semi-major axis.
    pub fn major_axis(&self) -> &Vec3 {
        &self.axes[0]
    }

    /// `(a - b)(a - c) / a^2` before any clamping.
    pub fn oblateness(&self) -> f64 {
        let [a, b, c] = self.semi_axes;
        (a - b) * (a - c) / (a * a)
    }
}

/// A metric value plus whether a degenerate case was hit on the way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub degenerate: bool,
}

/// Semi-axes `r_i = 1 / sqrt(q_i)` from the eigen (= singular) values `q_i` of
/// an SPD matrix, in descending order, with matched unit directions.
///
/// Directions are sign-normalized so that their largest-magnitude component
/// is positive.
pub fn axes_from_shape(a: &Mat3) -> Result<([f64; 3], [Vec3; 3])> {
    let scale = a.abs().max();
    if !scale.is_finite() || scale <= 0.0 || (a - a.transpose()).abs().max() > 1e-9 * scale {
        return Err(Error::NotSpd);
    }
    let eig = SymmetricEigen::new(0.5 * (a + a.transpose()));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut semi = [0.0; 3];
    let mut axes = [Vec3::zeros(); 3];
    for (k, &i) in order.iter().enumerate() {
        let q = eig.eigenvalues[i];
        if !(q > 0.0) {
            return Err(Error::NotSpd);
        }
        semi[k] = 1.0 / libm::sqrt(q);
        let mut v: Vec3 = eig.eigenvectors.column(i).into();
        v.normalize_mut();
        let lead = v.iter().copied().fold(0.0f64, |m, c| if c.abs() > m.abs() { c } else { m });
        if lead < 0.0 {
            v = -v;
        }
        axes[k] = v;
    }
    Ok((semi, axes))
}

/// Distance between the two centers.
pub fn center_distance(e1: &Ellipsoid, e2: &Ellipsoid) -> f64 {
    (e2.center - e1.center).norm()
}

/// `1 - |cos|` of the angle between the two major axes, in `[0, 1]`.
///
/// Axes are lines, so antiparallel counts as aligned. Flagged when either
/// major axis is not unique.
pub fn major_axis_distance(e1: &Ellipsoid, e2: &Ellipsoid) -> Flagged {
    let tie = |e: &Ellipsoid| e.semi_axes[0] - e.semi_axes[1] < AXIS_TIE_TOL * e.semi_axes[0];
    let (u, v) = (e1.major_axis(), e2.major_axis());
    let cos = (u.dot(v) / (u.norm() * v.norm())).abs().min(1.0);
    Flagged {
        value: 1.0 - cos,
        degenerate: tie(e1) || tie(e2),
    }
}

/// Oblateness floored at [`OBL_EPS`].
pub fn clamped_oblateness(e: &Ellipsoid) -> Flagged {
    let obl = e.oblateness();
    if obl < OBL_EPS {
        Flagged {
            value: OBL_EPS,
            degenerate: true,
        }
    } else {
        Flagged {
            value: obl,
            degenerate: false,
        }
    }
}

/// `|ln(obl2 / obl1)|`.
pub fn oblateness_similarity(e1: &Ellipsoid, e2: &Ellipsoid) -> Flagged {
    let (o1, o2) = (clamped_oblateness(e1), clamped_oblateness(e2));
    Flagged {
        value: libm::log(o2.value / o1.value).abs(),
        degenerate: o1.degenerate || o2.degenerate,
    }
}

/// `vol_ref / vol`: below 1 when the candidate is larger than the reference.
pub fn volume_ratio(reference: &Ellipsoid, e: &Ellipsoid) -> f64 {
    reference.volume() / e.volume()
}
