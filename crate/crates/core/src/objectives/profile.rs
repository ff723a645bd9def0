//! The eleven-objective evaluation of a candidate limb.

use alloc::vec::Vec;

use super::physical::{f5, moment_of_inertia, relative_mass, sts_support_force};
use super::DecisionVector;
use crate::ellipsoid::{
    center_distance, fit_workspace, major_axis_distance, oblateness_similarity, volume_ratio, Ellipsoid, MveeOptions,
};
use crate::error::Result;
use crate::kinematics::{
    build_cane_model, build_human_arm, build_srl_lower, build_srl_upper, BodyParams, JointSampleSet, PlanarLeg,
};
use crate::rng::derive_seed;

pub const OBJECTIVES: usize = 11;

/// Column names of the eleven objectives, in evaluation order.
pub const OBJECTIVE_NAMES: [&str; OBJECTIVES] = [
    "upper_cd", "upper_smad", "upper_obl", "upper_vol", "lower_cd", "lower_smad", "lower_obl", "lower_vol", "force",
    "mass", "inertia",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Upper,
    Lower,
}

/// Center distance, major-axis distance, oblateness log-ratio and volume
/// ratio of a candidate ellipsoid against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityBlock {
    pub values: [f64; 4],
    /// The major axis of one ellipsoid was not unique.
    pub axis_tie: bool,
    /// An oblateness was clamped.
    pub oblateness_clamped: bool,
}

pub fn similarity(reference: &Ellipsoid, candidate: &Ellipsoid) -> SimilarityBlock {
    let f2 = major_axis_distance(reference, candidate);
    let f3 = oblateness_similarity(reference, candidate);
    SimilarityBlock {
        values: [
            center_distance(reference, candidate),
            f2.value,
            f3.value,
            volume_ratio(reference, candidate),
        ],
        axis_tie: f2.degenerate,
        oblateness_clamped: f3.degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Flags {
    pub axis_tie: bool,
    pub oblateness_clamped: bool,
    pub singular_poses: usize,
    pub unreachable_poses: usize,
}

/// Raw sub-objective values of one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Objectives {
    pub upper: [f64; 4],
    pub lower: [f64; 4],
    pub f5: f64,
    pub f6: f64,
    pub f7: f64,
    /// Sit-to-stand support force behind `f5`, N.
    pub support_force: f64,
    pub flags: Flags,
}

impl Objectives {
    pub fn values(&self) -> [f64; OBJECTIVES] {
        let mut v = [0.0; OBJECTIVES];
        v[..4].copy_from_slice(&self.upper);
        v[4..8].copy_from_slice(&self.lower);
        v[8] = self.f5;
        v[9] = self.f6;
        v[10] = self.f7;
        v
    }
}

/// Objectives together with their distance to a reference front and the
/// resulting cost.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectiveProfile {
    pub x: DecisionVector,
    pub objectives: Objectives,
    pub d: [f64; OBJECTIVES],
    pub phi: f64,
}

impl ObjectiveProfile {
    pub fn new(x: DecisionVector, objectives: Objectives, pf: &[f64; OBJECTIVES]) -> Self {
        let d = distance_vector(&objectives.values(), pf);
        ObjectiveProfile {
            x,
            objectives,
            d,
            phi: igd(&d, 2.0),
        }
    }
}

/// `max(f_k - pf_k, 0)` for every component.
pub fn distance_vector<const N: usize>(f: &[f64; N], pf: &[f64; N]) -> [f64; N] {
    core::array::from_fn(|k| (f[k] - pf[k]).max(0.0))
}

/// Generational distance `(1/|D|) (sum d_k^p)^(1/p)`.
pub fn igd(d: &[f64], p: f64) -> f64 {
    if d.is_empty() {
        return 0.0;
    }
    let sum: f64 = if p == 2.0 {
        d.iter().map(|v| v * v).sum()
    } else {
        d.iter().map(|v| libm::pow(v.abs(), p)).sum()
    };
    libm::pow(sum, 1.0 / p) / d.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SamplingParams {
    /// Workspace samples per candidate.
    pub n: usize,
    /// Workspace samples of the human-arm and cane reference fits.
    pub n_reference: usize,
    pub seed: u64,
    pub mvee_tol: f64,
    pub mvee_max_iter: usize,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            n: 10_000,
            n_reference: 10_000,
            seed: 0,
            mvee_tol: 1e-7,
            mvee_max_iter: 10_000,
        }
    }
}

impl SamplingParams {
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    fn mvee(&self) -> MveeOptions {
        MveeOptions {
            tol: self.mvee_tol,
            max_iter: self.mvee_max_iter,
        }
    }
}

/// Labels separating the sample streams derived from one seed.
const UPPER_STREAM: u64 = 1;
const LOWER_STREAM: u64 = 2;
const ARM_STREAM: u64 = 3;
const CANE_STREAM: u64 = 4;

/// Evaluates candidates against fixed reference ellipsoids, reusing one set
/// of joint samples per mode for every candidate.
#[derive(Debug, Clone)]
pub struct Evaluator {
    cfg: BodyParams,
    sampling: SamplingParams,
    upper_samples: JointSampleSet,
    lower_samples: JointSampleSet,
    arm: Ellipsoid,
    cane: Ellipsoid,
}

impl Evaluator {
    pub fn new(cfg: BodyParams, sampling: SamplingParams) -> Result<Self> {
        cfg.validate()?;
        if sampling.n == 0 || sampling.n_reference == 0 || !(sampling.mvee_tol > 0.0) {
            return Err(crate::error::invalid("sample counts and the MVEE tolerance must be positive"));
        }
        let opts = sampling.mvee();
        let arm_chain = build_human_arm(&cfg)?;
        let arm_cloud = JointSampleSet::new(&arm_chain, sampling.n_reference, derive_seed(sampling.seed, ARM_STREAM));
        let arm = fit_workspace(&arm_cloud.points(&arm_chain), &opts, cfg.min_thickness)?.ellipsoid;
        let cane_chain = build_cane_model(&cfg)?;
        let cane_cloud =
            JointSampleSet::new(&cane_chain, sampling.n_reference, derive_seed(sampling.seed, CANE_STREAM));
        let cane = fit_workspace(&cane_cloud.points(&cane_chain), &opts, cfg.min_thickness)?.ellipsoid;

        // Sample sets depend only on axis directions and limits, so any
        // in-bounds candidate can stand in for the layout.
        let probe = DecisionVector::new_unchecked(DecisionVector::LOWER);
        let upper_samples = JointSampleSet::new(
            &build_srl_upper(&probe, &cfg)?,
            sampling.n,
            derive_seed(sampling.seed, UPPER_STREAM),
        );
        let lower_samples = JointSampleSet::new(
            &build_srl_lower(&probe, &cfg)?,
            sampling.n,
            derive_seed(sampling.seed, LOWER_STREAM),
        );
        Ok(Evaluator {
            cfg,
            sampling,
            upper_samples,
            lower_samples,
            arm,
            cane,
        })
    }

    pub fn cfg(&self) -> &BodyParams {
        &self.cfg
    }

    pub fn sampling(&self) -> &SamplingParams {
        &self.sampling
    }

    /// Reference ellipsoid of a mode: the human arm for the upper mode, the
    /// cane for the lower.
    pub fn reference(&self, mode: Mode) -> &Ellipsoid {
        match mode {
            Mode::Upper => &self.arm,
            Mode::Lower => &self.cane,
        }
    }

    /// Workspace cloud of the limb in `mode`. The lower mode keeps only
    /// samples that can brace against the ground.
    pub fn workspace(&self, x: &DecisionVector, mode: Mode) -> Result<Vec<crate::kinematics::Vec3>> {
        match mode {
            Mode::Upper => {
                let chain = build_srl_upper(x, &self.cfg)?;
                Ok(self.upper_samples.points(&chain))
            }
            Mode::Lower => {
                let chain = build_srl_lower(x, &self.cfg)?;
                let leg = PlanarLeg::from_chain(&chain)?;
                let ground_z = chain.joints[0].twist.point().z - self.cfg.ground_offset;
                leg.ground_filter(&self.lower_samples.points(&chain), ground_z)
            }
        }
    }

    pub fn fit(&self, x: &DecisionVector, mode: Mode) -> Result<Ellipsoid> {
        let points = self.workspace(x, mode)?;
        Ok(fit_workspace(&points, &self.sampling.mvee(), self.cfg.min_thickness)?.ellipsoid)
    }

    pub fn similarity_block(&self, x: &DecisionVector, mode: Mode) -> Result<SimilarityBlock> {
        Ok(similarity(self.reference(mode), &self.fit(x, mode)?))
    }

    pub fn objectives(&self, x: &DecisionVector) -> Result<Objectives> {
        x.validate()?;
        let upper = self.similarity_block(x, Mode::Upper)?;
        let lower = self.similarity_block(x, Mode::Lower)?;
        let force = sts_support_force(x, &self.cfg)?;
        Ok(Objectives {
            upper: upper.values,
            lower: lower.values,
            f5: f5(force.force, self.cfg.force_scale),
            f6: relative_mass(x, &self.cfg),
            f7: moment_of_inertia(x, &self.cfg),
            support_force: force.force,
            flags: Flags {
                axis_tie: upper.axis_tie || lower.axis_tie,
                oblateness_clamped: upper.oblateness_clamped || lower.oblateness_clamped,
                singular_poses: force.singular_poses,
                unreachable_poses: force.unreachable_poses,
            },
        })
    }

    pub fn profile(&self, x: &DecisionVector, pf: &[f64; OBJECTIVES]) -> Result<ObjectiveProfile> {
        Ok(ObjectiveProfile::new(*x, self.objectives(x)?, pf))
    }
}

/// Similarity block of one mode with a freshly built evaluator.
pub fn eval_similarity_block(
    x: &DecisionVector,
    mode: Mode,
    cfg: &BodyParams,
    sampling: SamplingParams,
) -> Result<SimilarityBlock> {
    Evaluator::new(cfg.clone(), sampling)?.similarity_block(x, mode)
}
