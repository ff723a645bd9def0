//! Limb and reference-body chain builders.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use super::{ChainKind, ChainModel, JointSpec, Pose, Twist, Vec3};
use crate::error::{invalid, Result};
use crate::objectives::DecisionVector;

const DEG: f64 = PI / 180.0;

/// Joint layout of the supernumerary limb.
///
/// Joint 1 sits at the waist mount; links 1..4 leave each joint along
/// `link_direction` in the zero posture.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SrlLayout {
    pub mount: [f64; 3],
    pub link_direction: [f64; 3],
    pub joint_axes: [[f64; 3]; 4],
    pub joint_limits: [[f64; 2]; 4],
    /// Angles of joints 1 and 4 when the limb acts as a leg.
    pub lower_locked: [f64; 2],
}

impl Default for SrlLayout {
    fn default() -> Self {
        SrlLayout {
            mount: [0.0, 0.0, 0.95],
            link_direction: [0.0, 0.0, -1.0],
            // Vertical transitional joint, then three pitch joints.
            joint_axes: [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            joint_limits: [
                [-FRAC_PI_2, FRAC_PI_2],
                [-FRAC_PI_2, FRAC_PI_2],
                [0.0, 5.0 * FRAC_PI_6],
                [-FRAC_PI_2, FRAC_PI_2],
            ],
            lower_locked: [0.0, 0.0],
        }
    }
}

/// Reference human arm: spherical shoulder plus elbow hinge, hanging along -Z
/// in the zero posture.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ArmModel {
    pub shoulder: [f64; 3],
    pub upper_arm: f64,
    /// Forearm plus hand.
    pub forearm: f64,
    /// Flexion, abduction, axial rotation, elbow flexion.
    pub joint_limits: [[f64; 2]; 4],
}

impl Default for ArmModel {
    fn default() -> Self {
        ArmModel {
            shoulder: [0.0, 0.0, 1.40],
            upper_arm: 0.30,
            forearm: 0.33,
            joint_limits: [
                [-FRAC_PI_3, PI],
                [-FRAC_PI_6, 5.0 * FRAC_PI_6],
                [-FRAC_PI_2, FRAC_PI_2],
                [0.0, 5.0 * FRAC_PI_6],
            ],
        }
    }
}

/// Cane held in the hand: a two-axis pivot at the grip.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CaneModel {
    pub pivot: [f64; 3],
    pub length: f64,
    /// Sweep about the lateral axis (forward/backward), radians.
    pub sagittal: [f64; 2],
    /// Sweep about the anterior axis (sideways), radians.
    pub lateral: [f64; 2],
}

impl Default for CaneModel {
    fn default() -> Self {
        CaneModel {
            pivot: [0.10, 0.15, 0.85],
            length: 0.85,
            sagittal: [-30.0 * DEG, 30.0 * DEG],
            lateral: [-15.0 * DEG, 15.0 * DEG],
        }
    }
}

/// Sit-to-stand trajectory of the limb mount, in the sagittal (Y, Z) plane,
/// measured from the footline on the ground.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct StsModel {
    /// Mount `(y, z)` when seated.
    pub mount_seated: [f64; 2],
    /// Mount `(y, z)` when standing.
    pub mount_standing: [f64; 2],
    pub poses: usize,
}

impl Default for StsModel {
    fn default() -> Self {
        StsModel {
            mount_seated: [-0.30, 0.55],
            mount_standing: [0.0, 0.95],
            poses: 11,
        }
    }
}

/// Body, hardware and reference-model constants shared by every objective.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BodyParams {
    /// Leg length `L0`, m.
    pub leg_length: f64,
    /// Linear density of the link tubes, kg/m.
    pub link_density: f64,
    /// Masses of joint modules 2..4 and the end effector, kg.
    pub module_masses: [f64; 4],
    /// Continuous torque of joints 1..4, N m.
    pub torque_limits: [f64; 4],
    /// Scale of the reciprocal force objective, N.
    pub force_scale: f64,
    /// Depth of the ground plane below the mount for the reduced workspace, m.
    pub ground_offset: f64,
    /// Out-of-plane semi-axis given to ellipsoids of planar clouds, m.
    pub min_thickness: f64,
    pub srl: SrlLayout,
    pub arm: ArmModel,
    pub cane: CaneModel,
    pub sts: StsModel,
}

impl Default for BodyParams {
    fn default() -> Self {
        BodyParams {
            leg_length: 0.9,
            link_density: 0.208,
            // MintaSCA (1 kg, 38 N m) on the two proximal joints, TMotor
            // (0.521 kg, 8.3 N m) on the two distal ones.
            module_masses: [1.0, 0.521, 0.521, 0.3],
            torque_limits: [38.0, 38.0, 8.3, 8.3],
            force_scale: 100.0,
            ground_offset: 0.95,
            min_thickness: 1e-3,
            srl: SrlLayout::default(),
            arm: ArmModel::default(),
            cane: CaneModel::default(),
            sts: StsModel::default(),
        }
    }
}

impl BodyParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("leg_length", self.leg_length),
            ("link_density", self.link_density),
            ("force_scale", self.force_scale),
            ("ground_offset", self.ground_offset),
            ("min_thickness", self.min_thickness),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(alloc::format!("{name} must be positive and finite")));
            }
        }
        if self.module_masses.iter().chain(&self.torque_limits).any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(invalid("module masses and torque limits must be non-negative"));
        }
        if self.sts.poses < 2 {
            return Err(invalid("the sit-to-stand pose set needs at least two poses"));
        }
        Ok(())
    }
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn srl_chain(x: &DecisionVector, layout: &SrlLayout, kind: ChainKind) -> Result<ChainModel> {
    let dir = v3(layout.link_direction);
    let dir = dir
        .try_normalize(1e-12)
        .ok_or_else(|| invalid("link direction must be non-zero"))?;
    let mut point = v3(layout.mount);
    let mut joints = Vec::with_capacity(4);
    for (i, len) in x.links().iter().enumerate() {
        let twist = Twist::revolute(v3(layout.joint_axes[i]), point)?;
        joints.push(JointSpec::free(twist, layout.joint_limits[i])?);
        point += dir * *len;
    }
    ChainModel::new(joints, Pose::from_translation(point), kind)
}

/// Limb in arm mode: all four joints free.
pub fn build_srl_upper(x: &DecisionVector, cfg: &BodyParams) -> Result<ChainModel> {
    x.validate()?;
    srl_chain(x, &cfg.srl, ChainKind::SrlUpper)
}

/// Limb in leg mode: joints 1 and 4 locked, joints 2 and 3 act as hip and knee.
pub fn build_srl_lower(x: &DecisionVector, cfg: &BodyParams) -> Result<ChainModel> {
    x.validate()?;
    let mut chain = srl_chain(x, &cfg.srl, ChainKind::SrlLower)?;
    chain.joints[0] = chain.joints[0].locked_at(cfg.srl.lower_locked[0]);
    chain.joints[3] = chain.joints[3].locked_at(cfg.srl.lower_locked[1]);
    Ok(chain)
}

pub fn build_human_arm(cfg: &BodyParams) -> Result<ChainModel> {
    let arm = &cfg.arm;
    if !(arm.upper_arm > 0.0) || !(arm.forearm > 0.0) {
        return Err(invalid("arm segments must have positive length"));
    }
    let shoulder = v3(arm.shoulder);
    let elbow = shoulder - Vec3::z() * arm.upper_arm;
    let hand = elbow - Vec3::z() * arm.forearm;
    let axes = [
        (Vec3::x(), shoulder),
        // Abduction lifts the right arm toward +X.
        (-Vec3::y(), shoulder),
        (-Vec3::z(), shoulder),
        (Vec3::x(), elbow),
    ];
    let joints = axes
        .iter()
        .zip(&arm.joint_limits)
        .map(|(&(w, q), &lim)| JointSpec::free(Twist::revolute(w, q)?, lim))
        .collect::<Result<Vec<_>>>()?;
    ChainModel::new(joints, Pose::from_translation(hand), ChainKind::HumanArm)
}

pub fn build_cane_model(cfg: &BodyParams) -> Result<ChainModel> {
    let cane = &cfg.cane;
    if !(cane.length > 0.0) {
        return Err(invalid("cane length must be positive"));
    }
    let pivot = v3(cane.pivot);
    let joints = alloc::vec![
        JointSpec::free(Twist::revolute(Vec3::x(), pivot)?, cane.sagittal)?,
        JointSpec::free(Twist::revolute(Vec3::y(), pivot)?, cane.lateral)?,
    ];
    let tip = pivot - Vec3::z() * cane.length;
    ChainModel::new(joints, Pose::from_translation(tip), ChainKind::Cane)
}
