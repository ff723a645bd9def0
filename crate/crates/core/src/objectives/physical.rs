//! Force, mass and inertia objectives.

use nalgebra::Vector2;

use super::DecisionVector;
use crate::error::Result;
use crate::kinematics::{build_srl_lower, BodyParams, PlanarLeg};

/// Stand-in for an infinite reciprocal force.
pub const BIG: f64 = 1e12;

/// Lever arms below this are treated as zero, m.
const ARM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportForce {
    /// Vertical force the leg can hold at its weakest pose, N.
    pub force: f64,
    /// Poses skipped because hip, knee and foot were collinear.
    pub singular_poses: usize,
    /// Poses where the foot could not reach the ground point.
    pub unreachable_poses: usize,
}

/// Vertical support force of the limb braced on the ground during
/// sit-to-stand.
///
/// The mount follows a straight line from the seated to the standing pose;
/// at each pose the hip/knee pair is solved so the foot touches the ground at
/// horizontal offset `c` from the footline. A vertical ground reaction `F`
/// needs hip torque `F * (foot - hip)_y` and knee torque
/// `F * (foot - knee)_y`; the largest `F` within both torque limits is the
/// pose's capacity and the weakest pose governs. A pose the leg cannot reach
/// contributes zero.
pub fn sts_support_force(x: &DecisionVector, cfg: &BodyParams) -> Result<SupportForce> {
    let chain = build_srl_lower(x, cfg)?;
    let leg = PlanarLeg::from_chain(&chain)?;
    let [hip_joint, knee_joint] = leg.free_joints();
    let limits = [cfg.torque_limits[hip_joint], cfg.torque_limits[knee_joint]];
    // Hip position relative to the mount, in the motion plane.
    let mount = nalgebra::Vector3::from(cfg.srl.mount);
    let hip_offset = leg.to_plane(&mount, leg.hip());

    let sts = &cfg.sts;
    let seated = Vector2::from(sts.mount_seated);
    let standing = Vector2::from(sts.mount_standing);
    let mut out = SupportForce {
        force: f64::INFINITY,
        singular_poses: 0,
        unreachable_poses: 0,
    };
    let mut evaluated = 0usize;
    for k in 0..sts.poses {
        let s = k as f64 / (sts.poses - 1) as f64;
        let hip = seated + (standing - seated) * s + hip_offset;
        let target = Vector2::new(x.c(), 0.0) - hip;
        let Some(pose) = leg.solve(target) else {
            out.unreachable_poses += 1;
            out.force = 0.0;
            continue;
        };
        let shank = pose.foot - pose.knee;
        let scale = pose.knee.norm() * shank.norm();
        if (pose.knee.x * shank.y - pose.knee.y * shank.x).abs() <= 1e-9 * scale {
            out.singular_poses += 1;
            continue;
        }
        evaluated += 1;
        let arms = [pose.foot.x, shank.x];
        let mut capacity = f64::INFINITY;
        for (arm, limit) in arms.iter().zip(limits) {
            if arm.abs() > ARM_EPS {
                capacity = capacity.min(limit / arm.abs());
            }
        }
        out.force = out.force.min(capacity);
    }
    if evaluated == 0 || !out.force.is_finite() {
        out.force = if evaluated == 0 { 0.0 } else { out.force.min(BIG) };
    }
    Ok(out)
}

/// Reciprocal force objective `kappa / F_H`, with [`BIG`] for zero force.
pub fn f5(force: f64, kappa: f64) -> f64 {
    if force > 0.0 {
        (kappa / force).min(BIG)
    } else {
        BIG
    }
}

/// Link mass of each tube, kg.
pub fn link_masses(x: &DecisionVector, cfg: &BodyParams) -> [f64; 4] {
    x.links().map(|l| l * cfg.link_density)
}

/// Mass deviation from a human leg of the same length, kg.
pub fn relative_mass(x: &DecisionVector, cfg: &BodyParams) -> f64 {
    cfg.link_density * (x.total_length() - cfg.leg_length).abs()
}

/// Inertia of the joint modules about the first joint, kg m^2. Module `i`
/// sits at the end of link `i`; link masses are neglected.
pub fn moment_of_inertia(x: &DecisionVector, cfg: &BodyParams) -> f64 {
    let mut reach = 0.0;
    let mut total = 0.0;
    for (l, m) in x.links().iter().zip(&cfg.module_masses) {
        reach += l;
        total += m * reach * reach;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prototype() -> DecisionVector {
        DecisionVector::new([0.1, 0.4, 0.3, 0.2, 0.19]).unwrap()
    }

    #[test]
    fn inertia_examples() {
        let mut cfg = BodyParams::default();
        cfg.module_masses = [0.521, 1.0, 0.521, 0.3];
        let expected = 0.521 * 0.01 + 0.25 + 0.521 * 0.64 + 0.3;
        assert!((moment_of_inertia(&prototype(), &cfg) - expected).abs() < 1e-12);
        assert!((expected - 0.8888).abs() < 5e-4);
        cfg.module_masses = [0.0; 4];
        assert_eq!(moment_of_inertia(&prototype(), &cfg), 0.0);
    }

    #[test]
    fn mass_examples() {
        let cfg = BodyParams::default();
        assert!((relative_mass(&prototype(), &cfg) - 0.0208).abs() < 1e-12);
        let on_plane = DecisionVector::new([0.1, 0.4, 0.2, 0.2, 0.0]).unwrap();
        assert!(relative_mass(&on_plane, &cfg) < 1e-15);
    }

    #[test]
    fn reciprocal_force() {
        assert_eq!(f5(100.0, 100.0), 1.0);
        assert_eq!(f5(0.0, 100.0), BIG);
        assert!((f5(300.0, 100.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn force_scales_with_torque() {
        let mut cfg = BodyParams::default();
        let base = sts_support_force(&prototype(), &cfg).unwrap().force;
        assert!(base > 0.0);
        cfg.torque_limits = cfg.torque_limits.map(|t| 2.0 * t);
        let doubled = sts_support_force(&prototype(), &cfg).unwrap().force;
        assert!((doubled - 2.0 * base).abs() < 1e-9 * base);
        cfg.torque_limits = [0.0; 4];
        assert_eq!(sts_support_force(&prototype(), &cfg).unwrap().force, 0.0);
    }
}
