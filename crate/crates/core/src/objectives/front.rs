//! Reference front: a component-wise utopia estimate of the eleven objectives.

use alloc::vec::Vec;

use rand::Rng;

use super::profile::{Evaluator, Objectives, OBJECTIVES};
use super::DecisionVector;
use crate::error::{invalid, Result};
use crate::exec::par_map;
use crate::rng::{halton_point, substream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FrontSource {
    UserSupplied,
    Estimated,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReferenceFront {
    pub pf: [f64; OBJECTIVES],
    pub source: FrontSource,
    /// Candidates drawn for the estimate.
    pub budget: usize,
    /// Candidates that evaluated successfully.
    pub evaluated: usize,
    pub seed: u64,
}

impl ReferenceFront {
    pub fn user_supplied(pf: [f64; OBJECTIVES]) -> Result<Self> {
        if pf.iter().any(|v| !v.is_finite()) {
            return Err(invalid("reference front values must be finite"));
        }
        Ok(ReferenceFront {
            pf,
            source: FrontSource::UserSupplied,
            budget: 0,
            evaluated: 0,
            seed: 0,
        })
    }

    /// Component-wise minimum of a set of objective vectors.
    pub fn from_objectives<'a>(objectives: impl IntoIterator<Item = &'a Objectives>, seed: u64) -> Result<Self> {
        let mut pf = [f64::INFINITY; OBJECTIVES];
        let mut count = 0;
        for o in objectives {
            for (p, v) in pf.iter_mut().zip(o.values()) {
                *p = p.min(v);
            }
            count += 1;
        }
        if count == 0 {
            return Err(invalid("no candidate of the reference-front sample could be evaluated"));
        }
        Ok(ReferenceFront {
            pf,
            source: FrontSource::Estimated,
            budget: count,
            evaluated: count,
            seed,
        })
    }
}

/// The space-filling sample behind [`estimate_reference_front`]: a randomly
/// shifted Halton sequence over the decision box. Larger budgets extend
/// smaller ones.
pub fn front_samples(budget: usize, seed: u64) -> Vec<DecisionVector> {
    let mut rng = substream(seed, Purpose::FrontShift, 0, 0);
    let shift: [f64; 5] = core::array::from_fn(|_| rng.gen());
    (0..budget as u64)
        .map(|i| {
            let mut u = [0.0; 5];
            halton_point(i, &shift, &mut u);
            let x = core::array::from_fn(|d| {
                let (lo, hi) = (DecisionVector::LOWER[d], DecisionVector::UPPER[d]);
                (lo + (hi - lo) * u[d]).clamp(lo, hi)
            });
            DecisionVector::new_unchecked(x)
        })
        .collect()
}

/// Estimates the reference front as the per-objective minimum over
/// `budget` space-filling candidates. Candidates that fail to evaluate are
/// skipped.
pub fn estimate_reference_front(evaluator: &Evaluator, budget: usize, seed: u64) -> Result<ReferenceFront> {
    let samples = front_samples(budget, seed);
    let results = par_map(&samples, |x| evaluator.objectives(x).ok());
    let ok: Vec<&Objectives> = results.iter().flatten().collect();
    let mut front = ReferenceFront::from_objectives(ok.iter().copied(), seed)?;
    front.budget = budget;
    Ok(front)
}
