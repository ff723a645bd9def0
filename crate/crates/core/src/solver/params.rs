use crate::error::{invalid, Result};

/// How the first population is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InitScheme {
    /// Latin hypercube: one individual per stratum in every dimension.
    Stratified,
    /// Independent uniform draws.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverParams {
    pub pop: usize,
    pub max_iter: usize,
    /// Perturbation scale at the first iteration.
    pub alpha: f64,
    /// Perturbation scale at the last iteration; interpolated linearly.
    pub alpha_final: f64,
    pub i0: f64,
    pub i_min: f64,
    pub gamma: f64,
    pub beta0: f64,
    pub beta_min: f64,
    pub eta: f64,
    /// Spread of replacements around their dominator, as a fraction of the
    /// box width.
    pub k_replace: f64,
    pub conv_threshold: f64,
    pub conv_window: usize,
    /// Replace dominated individuals and seed repulsion centers.
    pub replacement: bool,
    /// Split the population into high/medium/low correlation groups.
    pub subpopulations: bool,
    pub init: InitScheme,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            pop: 81,
            max_iter: 300,
            alpha: 0.5,
            alpha_final: 0.05,
            i0: 1.0,
            i_min: 0.2,
            gamma: 1.0,
            beta0: 1.0,
            beta_min: 0.01,
            eta: 10.0,
            k_replace: 0.1,
            conv_threshold: 0.2,
            conv_window: 10,
            replacement: true,
            subpopulations: true,
            init: InitScheme::Stratified,
        }
    }
}

impl SolverParams {
    /// The plain firefly baseline: no replacement, no subpopulations,
    /// uniform initialization.
    pub fn plain_firefly(&self) -> Self {
        SolverParams {
            replacement: false,
            subpopulations: false,
            init: InitScheme::Uniform,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop < 3 {
            return Err(invalid("pop must be at least 3"));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be positive"));
        }
        let positive = [("i0", self.i0), ("gamma", self.gamma), ("eta", self.eta)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(alloc::format!("{name} must be positive")));
            }
        }
        let non_negative = [
            ("alpha", self.alpha),
            ("alpha_final", self.alpha_final),
            ("i_min", self.i_min),
            ("beta0", self.beta0),
            ("beta_min", self.beta_min),
            ("k_replace", self.k_replace),
            ("conv_threshold", self.conv_threshold),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(alloc::format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Perturbation scale at iteration `t` (1-based).
    pub fn alpha_at(&self, t: usize) -> f64 {
        if self.max_iter <= 1 {
            return self.alpha;
        }
        let s = (t.saturating_sub(1)) as f64 / (self.max_iter - 1) as f64;
        self.alpha + (self.alpha_final - self.alpha) * s.min(1.0)
    }

    /// Attractiveness `I0 exp(-gamma r^2) + I_min`.
    pub fn attraction(&self, r: f64) -> f64 {
        self.i0 * libm::exp(-self.gamma * r * r) + self.i_min
    }

    /// Repulsion `beta0 exp(-eta r^2) + beta_min`.
    pub fn repulsion(&self, r: f64) -> f64 {
        self.beta0 * libm::exp(-self.eta * r * r) + self.beta_min
    }
}
