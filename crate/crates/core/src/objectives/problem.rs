use super::front::ReferenceFront;
use super::profile::{Evaluator, ObjectiveProfile};
use super::{Bounds, DecisionVector, BIG, OBJECTIVES};
use crate::error::Result;
use crate::solver::{Evaluation, Problem, PENALTY};

/// The limb-sizing problem: minimize the generational distance of the
/// eleven objectives to a reference front.
#[derive(Debug, Clone)]
pub struct SrlProblem {
    evaluator: Evaluator,
    front: ReferenceFront,
    bounds: Bounds,
}

impl SrlProblem {
    pub fn new(evaluator: Evaluator, front: ReferenceFront) -> Self {
        SrlProblem {
            evaluator,
            front,
            bounds: Bounds::srl(),
        }
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn front(&self) -> &ReferenceFront {
        &self.front
    }

    pub fn profile(&self, x: &DecisionVector) -> Result<ObjectiveProfile> {
        self.evaluator.profile(x, &self.front.pf)
    }
}

impl Problem for SrlProblem {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn objective_count(&self) -> usize {
        OBJECTIVES
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        match DecisionVector::from_slice(x).and_then(|x| self.profile(&x)) {
            Ok(p) => Evaluation {
                objectives: p.objectives.values().to_vec(),
                phi: p.phi,
                failed: false,
            },
            Err(_) => Evaluation {
                objectives: alloc::vec![BIG; OBJECTIVES],
                phi: PENALTY,
                failed: true,
            },
        }
    }
}
