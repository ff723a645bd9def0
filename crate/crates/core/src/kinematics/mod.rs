//! Serial-chain kinematics on the product of exponentials.
//!
//! A chain is a list of revolute joints, each described by a unit axis and a
//! point on that axis, expressed in the world frame at the zero posture,
//! plus the tool pose at the zero posture. The world frame used by the limb
//! models has its origin on the ground, X lateral (toward the limb side),
//! Y anterior and Z up.

mod models;
mod workspace;

pub use models::{
    build_cane_model, build_human_arm, build_srl_lower, build_srl_upper, ArmModel, BodyParams,
    CaneModel, SrlLayout, StsModel,
};
pub use workspace::{
    reduced_workspace, sample_workspace, GroundFilter, Interval, JointSampleSet, LegPose, PlanarLeg,
    PointCloud,
};

use alloc::vec::Vec;
use core::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use crate::error::{invalid, Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Rigid transform: `p -> rotation * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Pose {
            rotation: Mat3::identity(),
            translation,
        }
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    /// True when the rotation block is orthonormal with determinant +1.
    pub fn is_valid(&self, tol: f64) -> bool {
        let r = &self.rotation;
        let err = (r.transpose() * r - Mat3::identity()).abs().max();
        err <= tol && (r.determinant() - 1.0).abs() <= tol && self.translation.iter().all(|v| v.is_finite())
    }
}

impl Mul for Pose {
    type Output = Pose;

    fn mul(self, rhs: Pose) -> Pose {
        Pose {
            rotation: self.rotation * rhs.rotation,
            translation: self.rotation * rhs.translation + self.translation,
        }
    }
}

/// Revolute twist: a unit axis direction through a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    omega: Vec3,
    point: Vec3,
}

impl Twist {
    /// Normalizes `axis`; fails on a zero or non-finite axis.
    pub fn revolute(axis: Vec3, point: Vec3) -> Result<Self> {
        let norm = axis.norm();
        if !(norm > 1e-12) || !norm.is_finite() || point.iter().any(|v| !v.is_finite()) {
            return Err(invalid("twist axis must be a finite non-zero vector"));
        }
        Ok(Twist {
            omega: axis / norm,
            point,
        })
    }

    pub fn omega(&self) -> &Vec3 {
        &self.omega
    }

    pub fn point(&self) -> &Vec3 {
        &self.point
    }

    /// Linear part `-omega x point`.
    pub fn v(&self) -> Vec3 {
        -self.omega.cross(&self.point)
    }

    pub fn rotation(&self, theta: f64) -> Mat3 {
        rodrigues(&self.omega, theta)
    }
}

/// `exp(hat(omega) * theta)` for a unit axis.
pub fn rodrigues(omega: &Vec3, theta: f64) -> Mat3 {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let k = omega.cross_matrix();
    Mat3::identity() + k * s + (k * k) * (1.0 - c)
}

/// Exponential of a revolute twist: rotation about the axis, which stays fixed.
pub fn exp_twist(t: &Twist, theta: f64) -> Pose {
    let rotation = t.rotation(theta);
    Pose {
        rotation,
        translation: (Mat3::identity() - rotation) * t.point,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSpec {
    pub twist: Twist,
    /// `[min, max]` in radians.
    pub limits: [f64; 2],
    pub locked: bool,
    pub locked_angle: f64,
}

impl JointSpec {
    pub fn free(twist: Twist, limits: [f64; 2]) -> Result<Self> {
        if !(limits[0] <= limits[1]) {
            return Err(invalid("joint limits must satisfy min <= max"));
        }
        Ok(JointSpec {
            twist,
            limits,
            locked: false,
            locked_angle: 0.0,
        })
    }

    pub fn locked_at(mut self, angle: f64) -> Self {
        self.locked = true;
        self.locked_angle = angle;
        self
    }

    /// The angle actually applied for a requested `theta`.
    pub fn effective_angle(&self, theta: f64) -> f64 {
        if self.locked {
            self.locked_angle
        } else {
            theta
        }
    }
}

/// Which body the chain models. Carried through to sampled clouds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChainKind {
    SrlUpper,
    SrlLower,
    HumanArm,
    Cane,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainModel {
    pub joints: Vec<JointSpec>,
    pub tool_zero: Pose,
    pub kind: ChainKind,
}

impl ChainModel {
    pub fn new(joints: Vec<JointSpec>, tool_zero: Pose, kind: ChainKind) -> Result<Self> {
        if joints.is_empty() {
            return Err(invalid("a chain needs at least one joint"));
        }
        if !tool_zero.is_valid(1e-9) {
            return Err(invalid("tool pose is not a rigid transform"));
        }
        Ok(ChainModel {
            joints,
            tool_zero,
            kind,
        })
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn free_joints(&self) -> usize {
        self.joints.iter().filter(|j| !j.locked).count()
    }

    /// Upper bound on the distance of any tool position from the first joint
    /// axis point: sum of the distances between consecutive axis points and
    /// the tool.
    pub fn reach(&self) -> f64 {
        let mut total = 0.0;
        let mut prev = *self.joints[0].twist.point();
        for j in &self.joints[1..] {
            total += (j.twist.point() - prev).norm();
            prev = *j.twist.point();
        }
        total + (self.tool_zero.translation - prev).norm()
    }

    /// Tool position given the per-joint rotations `exp(hat(w_i) theta_i)`.
    ///
    /// Evaluates `q1 + R1 (q2 - q1 + R2 (... + Rn (p0 - qn)))`, which is the
    /// translation of the exponential product applied to the zero-posture tool
    /// origin.
    pub fn tool_point(&self, rotations: &[Mat3]) -> Vec3 {
        debug_assert_eq!(rotations.len(), self.joints.len());
        let mut y = self.tool_zero.translation;
        for (joint, r) in self.joints.iter().zip(rotations).rev() {
            let q = joint.twist.point();
            y = q + r * (y - q);
        }
        y
    }
}

/// `g(theta) = exp(xi_1 theta_1) ... exp(xi_n theta_n) g(0)`.
///
/// Locked joints ignore the supplied angle.
pub fn forward_kinematics(chain: &ChainModel, angles: &[f64]) -> Result<Pose> {
    if angles.len() != chain.joints.len() {
        return Err(Error::AngleCountMismatch {
            expected: chain.joints.len(),
            got: angles.len(),
        });
    }
    let mut g = Pose::identity();
    for (joint, &theta) in chain.joints.iter().zip(angles) {
        g = g * exp_twist(&joint.twist, joint.effective_angle(theta));
    }
    Ok(g * chain.tool_zero)
}
