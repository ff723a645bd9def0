//! Monte Carlo workspace sampling and the ground-contact reduced workspace.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::Vector2;
use rand::Rng;

use super::{exp_twist, rodrigues, ChainKind, ChainModel, Mat3, Pose, Vec3};
use crate::error::{Error, Result};
use crate::rng::{substream, Purpose};

type Vec2 = Vector2<f64>;

/// Samples drawn per random substream. Fixed so results do not depend on how
/// work is split.
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec3>,
    pub seed: u64,
    pub mode: ChainKind,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Joint-angle samples of one chain layout, stored as per-joint rotations.
///
/// Rotations depend only on the axis directions and angles, not on where the
/// axes sit, so one set can be reused for every candidate link length
/// (common random numbers).
#[derive(Debug, Clone)]
pub struct JointSampleSet {
    dof: usize,
    axes: Vec<Vec3>,
    rotations: Vec<Mat3>,
}

impl JointSampleSet {
    pub fn new(chain: &ChainModel, n: usize, seed: u64) -> Self {
        let dof = chain.dof();
        let mut rotations = Vec::with_capacity(n * dof);
        for (chunk, start) in (0..n).step_by(CHUNK).enumerate() {
            let mut rng = substream(seed, Purpose::JointAngles, 0, chunk as u64);
            for _ in start..(start + CHUNK).min(n) {
                for joint in &chain.joints {
                    // Draw even for locked joints so lock flags never shift the
                    // samples of the other joints.
                    let u: f64 = rng.gen();
                    let [lo, hi] = joint.limits;
                    let theta = joint.effective_angle(lo + (hi - lo) * u);
                    rotations.push(rodrigues(joint.twist.omega(), theta));
                }
            }
        }
        JointSampleSet {
            dof,
            axes: chain.joints.iter().map(|j| *j.twist.omega()).collect(),
            rotations,
        }
    }

    pub fn len(&self) -> usize {
        self.rotations.len() / self.dof.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    /// Whether `chain` has the axis directions these samples were drawn for.
    pub fn compatible(&self, chain: &ChainModel) -> bool {
        chain.dof() == self.dof
            && chain
                .joints
                .iter()
                .zip(&self.axes)
                .all(|(j, a)| (j.twist.omega() - a).norm() < 1e-12)
    }

    /// Tool positions of `chain` at every sample.
    pub fn points(&self, chain: &ChainModel) -> Vec<Vec3> {
        assert!(self.compatible(chain), "joint samples drawn for a different layout");
        self.rotations
            .chunks_exact(self.dof)
            .map(|rots| chain.tool_point(rots))
            .collect()
    }
}

/// `n` tool positions from i.i.d. uniform joint angles within limits.
pub fn sample_workspace(chain: &ChainModel, n: usize, seed: u64) -> PointCloud {
    PointCloud {
        points: JointSampleSet::new(chain, n, seed).points(chain),
        seed,
        mode: chain.kind,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroundFilter {
    Disabled,
    /// Ground plane `ground_offset` metres below the first joint axis point.
    Plane { ground_offset: f64 },
}

/// Samples of a leg-mode chain that can still brace against the ground.
///
/// A sample is kept when it is not below the ground plane and the ground
/// point directly beneath it is reachable by the hip/knee pair within joint
/// limits (the loop closed through the ground).
pub fn reduced_workspace(chain: &ChainModel, filter: GroundFilter, n: usize, seed: u64) -> Result<PointCloud> {
    let mut cloud = sample_workspace(chain, n, seed);
    if let GroundFilter::Plane { ground_offset } = filter {
        let leg = PlanarLeg::from_chain(chain)?;
        let ground_z = chain.joints[0].twist.point().z - ground_offset;
        cloud.points = leg.ground_filter(&cloud.points, ground_z)?;
    }
    Ok(cloud)
}

/// A chain with exactly two free, parallel, horizontal joint axes (hip and
/// knee); every other joint is locked.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarLeg {
    hip: Vec3,
    axis: Vec3,
    e1: Vec3,
    e2: Vec3,
    thigh: Vec2,
    shank: Vec2,
    free: [usize; 2],
    limits: [[f64; 2]; 2],
}

/// Outcome of solving the hip/knee pair for a ground contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPose {
    pub hip_angle: f64,
    pub knee_angle: f64,
    /// In-plane positions relative to the hip: `(horizontal, vertical)`.
    pub knee: Vector2<f64>,
    pub foot: Vector2<f64>,
}

impl PlanarLeg {
    pub fn from_chain(chain: &ChainModel) -> Result<Self> {
        let free: Vec<usize> = (0..chain.dof()).filter(|&i| !chain.joints[i].locked).collect();
        if free.len() != 2 {
            return Err(Error::NotPlanarLeg("needs exactly two free joints"));
        }
        let (a, b) = (free[0], free[1]);
        // Poses of the prefixes before each free joint, free joints at zero.
        let mut prefix = Pose::identity();
        let mut before = [Pose::identity(); 2];
        for (i, joint) in chain.joints.iter().enumerate() {
            if i == a {
                before[0] = prefix;
            }
            if i == b {
                before[1] = prefix;
            }
            prefix = prefix * exp_twist(&joint.twist, joint.effective_angle(0.0));
        }
        let end = (prefix * chain.tool_zero).translation;
        let ja = &chain.joints[a].twist;
        let jb = &chain.joints[b].twist;
        let hip = before[0].transform_point(ja.point());
        let axis = before[0].transform_vector(ja.omega());
        let knee_axis = before[1].transform_vector(jb.omega());
        let knee = before[1].transform_point(jb.point());
        if axis.cross(&knee_axis).norm() > 1e-9 || axis.dot(&knee_axis) < 0.0 {
            return Err(Error::NotPlanarLeg("hip and knee axes differ"));
        }
        if axis.z.abs() > 1e-9 {
            return Err(Error::NotPlanarLeg("joint axes must be horizontal"));
        }
        if (knee - hip).dot(&axis).abs() > 1e-9 || (end - hip).dot(&axis).abs() > 1e-9 {
            return Err(Error::NotPlanarLeg("links leave the motion plane"));
        }
        let e2 = Vec3::z();
        let e1 = e2.cross(&axis);
        let to2 = |p: Vec3| Vec2::new((p - hip).dot(&e1), (p - hip).dot(&e2));
        Ok(PlanarLeg {
            hip,
            axis,
            e1,
            e2,
            thigh: to2(knee),
            shank: to2(end) - to2(knee),
            free: [a, b],
            limits: [chain.joints[a].limits, chain.joints[b].limits],
        })
    }

    pub fn hip(&self) -> &Vec3 {
        &self.hip
    }

    pub fn axis(&self) -> &Vec3 {
        &self.axis
    }

    /// Chain indices of the hip and knee joints.
    pub fn free_joints(&self) -> [usize; 2] {
        self.free
    }

    pub fn thigh_length(&self) -> f64 {
        self.thigh.norm()
    }

    pub fn shank_length(&self) -> f64 {
        self.shank.norm()
    }

    /// In-plane coordinates of `p` relative to a hip placed at `hip`.
    pub fn to_plane(&self, hip: &Vec3, p: &Vec3) -> Vec2 {
        Vec2::new((p - hip).dot(&self.e1), (p - hip).dot(&self.e2))
    }

    pub fn with_hip(&self, hip: Vec3) -> Self {
        PlanarLeg { hip, ..self.clone() }
    }

    /// Hip and knee angles placing the foot at `target` (in-plane, relative to
    /// the hip), within joint limits. The knee-angle branch with the smaller
    /// value is tried first.
    pub fn solve(&self, target: Vec2) -> Option<LegPose> {
        let a = self.thigh.norm();
        let b = self.shank.norm();
        let d2 = target.norm_squared();
        let k = (d2 - a * a - b * b) / (2.0 * a * b);
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&k) {
            return None;
        }
        let phi = libm::acos(k.clamp(-1.0, 1.0));
        let delta = angle(&self.shank) - angle(&self.thigh);
        let mut candidates = [phi - delta, -phi - delta];
        candidates.sort_by(|x, y| wrap(*x).total_cmp(&wrap(*y)));
        for knee_angle in candidates {
            let Some(knee_angle) = wrap_into(knee_angle, self.limits[1]) else {
                continue;
            };
            let v = self.thigh + rotate(&self.shank, knee_angle);
            let Some(hip_angle) = wrap_into(angle(&target) - angle(&v), self.limits[0]) else {
                continue;
            };
            let knee = rotate(&self.thigh, hip_angle);
            let foot = knee + rotate(&self.shank, hip_angle + knee_angle);
            return Some(LegPose {
                hip_angle,
                knee_angle,
                knee,
                foot,
            });
        }
        None
    }

    /// Keeps points above `ground_z` whose ground projection the leg can reach.
    pub fn ground_filter(&self, points: &[Vec3], ground_z: f64) -> Result<Vec<Vec3>> {
        let intervals = self.ground_intervals(ground_z);
        let kept: Vec<Vec3> = points
            .iter()
            .filter(|p| {
                if p.z < ground_z {
                    return false;
                }
                let s = (*p - self.hip).dot(&self.e1);
                match intervals.iter().find(|iv| s <= iv.hi + INTERVAL_SLACK) {
                    // Close to a boundary: settle it with the exact solver.
                    Some(iv) if (s - iv.lo).abs() <= INTERVAL_SLACK || (s - iv.hi).abs() <= INTERVAL_SLACK => {
                        let contact = Vec3::new(p.x, p.y, ground_z);
                        self.solve(self.to_plane(&self.hip, &contact)).is_some()
                    }
                    Some(iv) => s >= iv.lo,
                    None => false,
                }
            })
            .copied()
            .collect();
        if kept.is_empty() {
            return Err(Error::EmptyWorkspace);
        }
        Ok(kept)
    }

    /// Horizontal positions (relative to the hip) where the foot can touch the
    /// ground line, as sorted disjoint intervals.
    ///
    /// Reachability only changes where the line crosses the workspace
    /// boundary circles or the circles traced with one joint at a limit, so
    /// testing one point between consecutive crossings settles each piece.
    pub fn ground_intervals(&self, ground_z: f64) -> Vec<Interval> {
        let g = ground_z - self.hip.z;
        let (a, b) = (self.thigh.norm(), self.shank.norm());
        let mut circles = alloc::vec![(Vec2::zeros(), a + b), (Vec2::zeros(), (a - b).abs())];
        for lim in self.limits[1] {
            circles.push((Vec2::zeros(), (self.thigh + rotate(&self.shank, lim)).norm()));
        }
        for lim in self.limits[0] {
            circles.push((rotate(&self.thigh, lim), b));
        }
        let mut cuts: Vec<f64> = Vec::new();
        for (center, r) in circles {
            let h = r * r - (g - center.y) * (g - center.y);
            if h >= 0.0 {
                let w = libm::sqrt(h);
                cuts.push(center.x - w);
                cuts.push(center.x + w);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        let mut out: Vec<Interval> = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.solve(Vec2::new(mid, g)).is_none() {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.hi == w[0] => last.hi = w[1],
                _ => out.push(Interval { lo: w[0], hi: w[1] }),
            }
        }
        out
    }
}

/// Points this close to an interval end are checked with the exact solver.
const INTERVAL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn angle(v: &Vec2) -> f64 {
    libm::atan2(v.y, v.x)
}

fn rotate(v: &Vec2, theta: f64) -> Vec2 {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

fn rem_2pi(x: f64) -> f64 {
    let r = libm::fmod(x, 2.0 * PI);
    if r < 0.0 {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Maps an angle into `(-pi, pi]`.
fn wrap(theta: f64) -> f64 {
    let t = rem_2pi(theta + PI) - PI;
    if t == -PI {
        PI
    } else {
        t
    }
}

/// The representative of `theta` modulo 2 pi inside `[lo, hi]`, if any.
fn wrap_into(theta: f64, [lo, hi]: [f64; 2]) -> Option<f64> {
    const EPS: f64 = 1e-12;
    let t = lo + rem_2pi(theta - lo);
    if t <= hi + EPS {
        return Some(t.min(hi));
    }
    // Just below `lo` counts as on the boundary.
    if t - 2.0 * PI >= lo - EPS {
        return Some(lo);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{build_srl_lower, build_srl_upper, forward_kinematics, BodyParams};
    use crate::objectives::DecisionVector;

    fn x_opt() -> DecisionVector {
        DecisionVector::from_slice(&[0.1, 0.4, 0.3, 0.2, 0.19]).unwrap()
    }

    #[test]
    fn sampling_matches_forward_kinematics() {
        let chain = build_srl_upper(&x_opt(), &BodyParams::default()).unwrap();
        let set = JointSampleSet::new(&chain, 10, 3);
        let pts = set.points(&chain);
        // Re-derive the angles from the rotations is awkward; instead check
        // each point against FK driven by the same draws.
        let mut rng = substream(3, Purpose::JointAngles, 0, 0);
        for p in pts {
            let angles: Vec<f64> = chain
                .joints
                .iter()
                .map(|j| {
                    let u: f64 = rng.gen();
                    j.limits[0] + (j.limits[1] - j.limits[0]) * u
                })
                .collect();
            let fk = forward_kinematics(&chain, &angles).unwrap().translation;
            assert!((fk - p).norm() < 1e-12);
        }
    }

    #[test]
    fn chunking_does_not_depend_on_length() {
        let chain = build_srl_upper(&x_opt(), &BodyParams::default()).unwrap();
        let short = sample_workspace(&chain, 300, 9);
        let long = sample_workspace(&chain, 700, 9);
        assert_eq!(short.points[..], long.points[..300]);
    }

    #[test]
    fn wrap_into_limits() {
        assert_eq!(wrap_into(0.5, [0.0, 1.0]), Some(0.5));
        assert!((wrap_into(0.5 + 2.0 * PI, [0.0, 1.0]).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(wrap_into(-0.5, [0.0, 1.0]), None);
        assert_eq!(wrap_into(-1e-14, [0.0, 1.0]), Some(0.0));
    }

    #[test]
    fn ground_intervals_match_exact_solver() {
        let cfg = BodyParams::default();
        for x in [[0.1, 0.4, 0.3, 0.2, 0.0], [0.3, 0.6, 0.1, 0.1, 0.0], [0.1, 0.2, 0.6, 0.6, 0.0]] {
            let chain = build_srl_lower(&DecisionVector::from_slice(&x).unwrap(), &cfg).unwrap();
            let leg = PlanarLeg::from_chain(&chain).unwrap();
            for ground_z in [0.0, 0.2, 0.5] {
                let g = ground_z - leg.hip().z;
                let intervals = leg.ground_intervals(ground_z);
                for k in 0..=4000 {
                    let s = -2.0 + 4.0 * k as f64 / 4000.0;
                    if intervals.iter().any(|iv| (s - iv.lo).abs() < 1e-9 || (s - iv.hi).abs() < 1e-9) {
                        continue;
                    }
                    let inside = intervals.iter().any(|iv| s >= iv.lo && s <= iv.hi);
                    assert_eq!(inside, leg.solve(Vec2::new(s, g)).is_some(), "x={x:?} z={ground_z} s={s}");
                }
            }
        }
    }

    #[test]
    fn leg_ik_round_trip() {
        let chain = build_srl_lower(&x_opt(), &BodyParams::default()).unwrap();
        let leg = PlanarLeg::from_chain(&chain).unwrap();
        assert!((leg.thigh_length() - 0.4).abs() < 1e-12);
        assert!((leg.shank_length() - 0.5).abs() < 1e-12);
        for (hip, knee) in [(0.3, 0.4), (-0.5, 1.2), (1.0, 2.0), (0.0, 0.05)] {
            let fk = forward_kinematics(&chain, &[0.0, hip, knee, 0.0]).unwrap().translation;
            let pose = leg.solve(leg.to_plane(leg.hip(), &fk)).expect("reachable");
            let again = forward_kinematics(&chain, &[0.0, pose.hip_angle, pose.knee_angle, 0.0])
                .unwrap()
                .translation;
            assert!((again - fk).norm() < 1e-9, "{again} vs {fk}");
        }
        // Beyond full extension.
        assert!(leg.solve(Vec2::new(0.0, -0.95)).is_none());
    }

    #[test]
    fn upper_chain_is_not_a_leg() {
        let chain = build_srl_upper(&x_opt(), &BodyParams::default()).unwrap();
        assert!(matches!(PlanarLeg::from_chain(&chain), Err(Error::NotPlanarLeg(_))));
    }
}
