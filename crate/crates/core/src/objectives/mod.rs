//! Sub-objectives, the distance vector to a reference front and its
//! generational-distance scalarization.

mod decision;
mod front;
mod physical;
mod problem;
mod profile;

pub use decision::{Bounds, DecisionVector};
pub use front::{estimate_reference_front, front_samples, FrontSource, ReferenceFront};
pub use physical::{f5, link_masses, moment_of_inertia, relative_mass, sts_support_force, SupportForce, BIG};
pub use problem::SrlProblem;
pub use profile::{
    distance_vector, eval_similarity_block, igd, similarity, Evaluator, Flags, Mode, ObjectiveProfile, Objectives,
    SamplingParams, SimilarityBlock, OBJECTIVES, OBJECTIVE_NAMES,
};
