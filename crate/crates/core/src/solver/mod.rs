//! Multi-subpopulation correction firefly search and its baselines.
//!
//! Each iteration replaces dominated individuals next to their best
//! dominator (the vacated spots become repulsion centers), splits the
//! population into thirds by how close each cost is to the best, and moves
//! the thirds by attraction, attraction minus repulsion, and repulsion alone.
//! Moves are synchronous and every random draw comes from a per-individual
//! substream, so results do not depend on evaluation order or thread count.

mod ops;
mod params;
mod problem;
mod swarm;

pub use ops::{init_population, pair_distance, pareto_dominates, partition, partition_sizes, Subpop};
pub use params::{InitScheme, SolverParams};
pub use problem::{Evaluation, Problem, Synthetic, PENALTY};
pub use swarm::{
    convergence_iteration, run, run_baseline_fa, run_baseline_fa_with_clock, run_random_search,
    run_random_search_with_clock, run_with_clock, Clock, Individual, NoClock, RunResult, RunTrace, Swarm,
};
