use std::f64::consts::{FRAC_PI_2, PI};

use limbsynth_core::kinematics::*;
use limbsynth_core::objectives::DecisionVector;
use limbsynth_core::Error;
use nalgebra::{Matrix4, Rotation3, Unit};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 4x4 homogeneous transform of a rotation by `theta` about the line through
/// `q` with direction `w`, built from nalgebra's axis-angle rotation.
fn homogeneous(w: &Vec3, q: &Vec3, theta: f64) -> Matrix4<f64> {
    let r = Rotation3::from_axis_angle(&Unit::new_normalize(*w), theta).into_inner();
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&(q - r * q));
    m
}

fn pose_matrix(p: &Pose) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&p.rotation);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&p.translation);
    m
}

fn oracle_fk(chain: &ChainModel, angles: &[f64]) -> Matrix4<f64> {
    let mut m = Matrix4::<f64>::identity();
    for (j, &a) in chain.joints.iter().zip(angles) {
        let theta = if j.locked { j.locked_angle } else { a };
        m *= homogeneous(j.twist.omega(), j.twist.point(), theta);
    }
    m * pose_matrix(&chain.tool_zero)
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if v.norm() > 0.1 {
            return v.normalize();
        }
    }
}

fn random_chain(rng: &mut ChaCha8Rng) -> ChainModel {
    let dof = rng.gen_range(1..=6);
    let joints = (0..dof)
        .map(|_| {
            let point = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let spec = JointSpec::free(Twist::revolute(random_unit(rng), point).unwrap(), [-PI, PI]).unwrap();
            if rng.gen_bool(0.2) {
                spec.locked_at(rng.gen_range(-PI..PI))
            } else {
                spec
            }
        })
        .collect();
    let r = Rotation3::from_axis_angle(&Unit::new_normalize(random_unit(rng)), rng.gen_range(-PI..PI));
    let tool = Pose {
        rotation: r.into_inner(),
        translation: Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    };
    ChainModel::new(joints, tool, ChainKind::Custom).unwrap()
}

#[test]
fn fk_matches_homogeneous_oracle_on_random_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let chain = random_chain(&mut rng);
        let angles: Vec<f64> = (0..chain.dof()).map(|_| rng.gen_range(-PI..PI)).collect();
        let got = pose_matrix(&forward_kinematics(&chain, &angles).unwrap());
        let want = oracle_fk(&chain, &angles);
        assert!((got - want).abs().max() < 1e-9);
        // The fast tool-point path agrees with the full product.
        let rots: Vec<Mat3> = chain
            .joints
            .iter()
            .zip(&angles)
            .map(|(j, &a)| j.twist.rotation(j.effective_angle(a)))
            .collect();
        let p = chain.tool_point(&rots);
        assert!((p - want.fixed_view::<3, 1>(0, 3)).norm() < 1e-9);
    }
}

#[test]
fn srl_chain_matches_oracle() {
    let cfg = BodyParams::default();
    let x = DecisionVector::new([0.1, 0.4, 0.3, 0.2, 0.19]).unwrap();
    let chain = build_srl_upper(&x, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let angles: Vec<f64> = chain.joints.iter().map(|j| rng.gen_range(j.limits[0]..=j.limits[1])).collect();
        let got = pose_matrix(&forward_kinematics(&chain, &angles).unwrap());
        assert!((got - oracle_fk(&chain, &angles)).abs().max() < 1e-9);
    }
}

#[test]
fn half_turn_about_offset_axis_matches_oracle() {
    let t = Twist::revolute(Vec3::z(), Vec3::new(1.0, 0.0, 0.0)).unwrap();
    let g = pose_matrix(&exp_twist(&t, PI));
    let oracle = homogeneous(&Vec3::z(), &Vec3::new(1.0, 0.0, 0.0), PI);
    assert!((g - oracle).abs().max() < 1e-12);
    let apply = |m: &Matrix4<f64>, p: [f64; 3]| m * nalgebra::Vector4::new(p[0], p[1], p[2], 1.0);
    assert!((apply(&g, [1.0, 0.0, 0.0]) - nalgebra::Vector4::new(1.0, 0.0, 0.0, 1.0)).norm() < 1e-12);
    assert!((apply(&g, [2.0, 0.0, 0.0]) - nalgebra::Vector4::new(0.0, 0.0, 0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn planar_two_link_about_x() {
    // Unit links along +Y, both joints about +X; the elbow bends the distal
    // link up out of the floor plane.
    let j1 = JointSpec::free(Twist::revolute(Vec3::x(), Vec3::zeros()).unwrap(), [-PI, PI]).unwrap();
    let j2 = JointSpec::free(Twist::revolute(Vec3::x(), Vec3::y()).unwrap(), [-PI, PI]).unwrap();
    let chain = ChainModel::new(vec![j1, j2], Pose::from_translation(Vec3::new(0.0, 2.0, 0.0)), ChainKind::Custom)
        .unwrap();
    let end = forward_kinematics(&chain, &[0.0, FRAC_PI_2]).unwrap().translation;
    assert!((end - Vec3::new(0.0, 1.0, 1.0)).norm() < 1e-12);
}

#[test]
fn lower_cloud_is_planar_and_inside_the_annulus() {
    let cfg = BodyParams::default();
    let x = DecisionVector::new([0.1, 0.4, 0.3, 0.2, 0.19]).unwrap();
    let chain = build_srl_lower(&x, &cfg).unwrap();
    let cloud = sample_workspace(&chain, 10_000, 5);
    let hip = chain.joints[1].twist.point();
    let (l2, l34) = (0.4, 0.3 + 0.2);
    let n = cloud.len() as f64;
    let mean_x = cloud.points.iter().map(|p| p.x).sum::<f64>() / n;
    let var_x = cloud.points.iter().map(|p| (p.x - mean_x).powi(2)).sum::<f64>() / n;
    assert!(var_x < 1e-18);
    for p in &cloud.points {
        let r = (p - hip).norm();
        assert!(r <= l2 + l34 + 1e-12 && r >= (l2 - l34 as f64).abs() - 1e-12);
    }
}

#[test]
fn arm_and_cane_geometry() {
    let cfg = BodyParams::default();
    let arm = build_human_arm(&cfg).unwrap();
    assert_eq!(arm.dof(), 4);
    let shoulder = Vec3::from(cfg.arm.shoulder);
    let reach = cfg.arm.upper_arm + cfg.arm.forearm;
    assert!(sample_workspace(&arm, 5000, 1).points.iter().all(|p| (p - shoulder).norm() <= reach + 1e-12));

    let cane = build_cane_model(&cfg).unwrap();
    let pivot = Vec3::from(cfg.cane.pivot);
    let cloud = sample_workspace(&cane, 5000, 1);
    assert!(cloud.points.iter().all(|p| ((p - pivot).norm() - cfg.cane.length).abs() < 1e-12));

    // Pure sagittal sweep of +-30 degrees: the arc's chord is 2 L sin(30).
    let mut sagittal = cfg.clone();
    sagittal.cane.lateral = [0.0, 0.0];
    let chain = build_cane_model(&sagittal).unwrap();
    let [lo, hi] = sagittal.cane.sagittal;
    let a = forward_kinematics(&chain, &[lo, 0.0]).unwrap().translation;
    let b = forward_kinematics(&chain, &[hi, 0.0]).unwrap().translation;
    assert!(((a - b).norm() - 2.0 * cfg.cane.length * (PI / 6.0).sin()).abs() < 1e-12);

    let mut frozen = cfg;
    frozen.cane.sagittal = [0.1, 0.1];
    frozen.cane.lateral = [0.0, 0.0];
    let cloud = sample_workspace(&build_cane_model(&frozen).unwrap(), 100, 2);
    assert!(cloud.points.iter().all(|p| (p - cloud.points[0]).norm() < 1e-15));
}

#[test]
fn reduced_workspace_filter() {
    let cfg = BodyParams::default();
    let x = DecisionVector::new([0.1, 0.403, 0.296, 0.204, 0.198]).unwrap();
    let chain = build_srl_lower(&x, &cfg).unwrap();
    let raw = sample_workspace(&chain, 10_000, 4);
    let unfiltered = reduced_workspace(&chain, GroundFilter::Disabled, 10_000, 4).unwrap();
    assert_eq!(unfiltered, raw);
    let kept = reduced_workspace(&chain, GroundFilter::Plane { ground_offset: cfg.ground_offset }, 10_000, 4)
        .unwrap()
        .len();
    assert!(kept > 0 && kept < 10_000, "kept {kept}");
    assert_eq!(
        reduced_workspace(&chain, GroundFilter::Plane { ground_offset: 10.0 }, 1000, 4),
        Err(Error::EmptyWorkspace)
    );
}

#[test]
fn sampling_is_reproducible() {
    let chain = build_srl_upper(&DecisionVector::new([0.2; 5]).unwrap(), &BodyParams::default()).unwrap();
    assert_eq!(sample_workspace(&chain, 3000, 9), sample_workspace(&chain, 3000, 9));
    assert_ne!(sample_workspace(&chain, 3000, 9), sample_workspace(&chain, 3000, 10));
    assert_eq!(sample_workspace(&chain, 10_000, 0).len(), 10_000);
}

fn links() -> impl Strategy<Value = [f64; 5]> {
    (0.1..=0.6f64, 0.1..=0.6f64, 0.1..=0.6f64, 0.1..=0.6f64, -0.5..=0.5f64).prop_map(|(a, b, c, d, e)| [a, b, c, d, e])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_parameter_subgroup(a in -PI..PI, b in -PI..PI, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = Twist::revolute(random_unit(&mut rng), Vec3::new(rng.gen(), rng.gen(), rng.gen())).unwrap();
        let lhs = exp_twist(&t, a) * exp_twist(&t, b);
        let rhs = exp_twist(&t, a + b);
        prop_assert!((lhs.rotation - rhs.rotation).abs().max() < 1e-9);
        prop_assert!((lhs.translation - rhs.translation).norm() < 1e-9);
    }

    #[test]
    fn fk_pose_is_rigid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_chain(&mut rng);
        let angles: Vec<f64> = (0..chain.dof()).map(|_| rng.gen_range(-PI..PI)).collect();
        prop_assert!(forward_kinematics(&chain, &angles).unwrap().is_valid(1e-9));
    }

    #[test]
    fn srl_points_lie_in_the_reach_ball(x in links(), seed in any::<u64>()) {
        let x = DecisionVector::new(x).unwrap();
        let cfg = BodyParams::default();
        let base = Vec3::from(cfg.srl.mount);
        let reach: f64 = x.links().iter().sum();
        for chain in [build_srl_upper(&x, &cfg).unwrap(), build_srl_lower(&x, &cfg).unwrap()] {
            let cloud = sample_workspace(&chain, 500, seed);
            prop_assert!(cloud.points.iter().all(|p| (p - base).norm() <= reach + 1e-12));
            prop_assert!(cloud.points.iter().all(|p| p.iter().all(|v| v.is_finite())));
        }
    }

    #[test]
    fn lower_mode_keeps_x_fixed(x in links(), seed in any::<u64>()) {
        let chain = build_srl_lower(&DecisionVector::new(x).unwrap(), &BodyParams::default()).unwrap();
        let cloud = sample_workspace(&chain, 300, seed);
        let x0 = cloud.points[0].x;
        prop_assert!(cloud.points.iter().all(|p| (p.x - x0).abs() < 1e-12));
    }
}
