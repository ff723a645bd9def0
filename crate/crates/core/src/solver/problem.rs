use alloc::vec::Vec;

use crate::objectives::Bounds;

/// Cost assigned to candidates whose evaluation failed.
pub const PENALTY: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objectives: Vec<f64>,
    /// Scalar cost minimized by the search.
    pub phi: f64,
    /// The candidate could not be evaluated and carries penalty values.
    pub failed: bool,
}

/// A box-constrained problem with vector objectives and a scalar cost.
pub trait Problem: Sync {
    fn bounds(&self) -> &Bounds;
    fn objective_count(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Evaluation;
}

/// Two objectives `(x1^2, (x1 - 2)^2)` on `[-2, 4]^2` whose front is the
/// curve `(t^2, (t - 2)^2)`, `t` in `[0, 2]`. The cost is half the norm of
/// the offset from the objective vector to the nearest front point.
#[derive(Debug, Clone)]
pub struct Synthetic {
    bounds: Bounds,
}

impl Default for Synthetic {
    fn default() -> Self {
        Synthetic {
            bounds: Bounds {
                lower: alloc::vec![-2.0, -2.0],
                upper: alloc::vec![4.0, 4.0],
            },
        }
    }
}

impl Synthetic {
    pub fn objectives(x: &[f64]) -> [f64; 2] {
        [x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)]
    }

    /// Front parameter `t` closest to the objective vector `f`.
    pub fn nearest_front_parameter(f: [f64; 2]) -> f64 {
        let dist2 = |t: f64| {
            let a = t * t - f[0];
            let b = (t - 2.0) * (t - 2.0) - f[1];
            a * a + b * b
        };
        // Coarse scan, then golden-section refinement around the best cell.
        const CELLS: usize = 400;
        let mut best = 0usize;
        for i in 1..=CELLS {
            if dist2(2.0 * i as f64 / CELLS as f64) < dist2(2.0 * best as f64 / CELLS as f64) {
                best = i;
            }
        }
        let h = 2.0 / CELLS as f64;
        let (mut lo, mut hi) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
        lo = lo.max(0.0);
        hi = hi.min(2.0);
        let g = 0.5 * (libm::sqrt(5.0) - 1.0);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if dist2(m1) <= dist2(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    }

    /// Offset of `f` from the nearest front point, component-wise.
    pub fn distance(f: [f64; 2]) -> [f64; 2] {
        let t = Self::nearest_front_parameter(f);
        [(f[0] - t * t).abs(), (f[1] - (t - 2.0) * (t - 2.0)).abs()]
    }
}

impl Problem for Synthetic {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn objective_count(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        let f = Self::objectives(x);
        let d = Self::distance(f);
        Evaluation {
            objectives: f.to_vec(),
            phi: crate::objectives::igd(&d, 2.0),
            failed: false,
        }
    }
}
