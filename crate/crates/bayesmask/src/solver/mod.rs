//! FAB solvers for the masked regression model.
//!
//! Three variants maximize the same lower bound:
//!
//! * `Em` — closed-form parameter updates every iteration,
//! * `Eg` — reparametrized gradient ascent on `(beta, pi)` every iteration,
//! * `Hybrid` — closed forms for the first `switch_iteration` iterations,
//!   gradient steps afterwards.
//!
//! Every iteration runs the mean-field E-step, prunes features whose
//! posterior mask mean fell below `delta`, then applies the parameter update.

mod fit;
mod steps;

pub use fit::{fit, FitFailure};
pub use steps::{
    fab_e_step, fab_g_step, fab_m_step, learning_coefficient, plain_gradient_step, prune,
    PruneOutcome,
};

pub(crate) use steps::{
    apply_direction, e_step_in_place, m_step_in_place, refresh_lambda, reparam_direction,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverVariant {
    Em,
    Eg,
    Hybrid,
}

/// How the solver state is seeded before the first iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum InitPolicy {
    /// Masks nearly all-on (`mu = 0.95`), `pi` at the column means, weights
    /// from a lightly ridged least-squares solve, noise from its closed form.
    /// Starts in the "all features on" regime so pruning is evidence-driven.
    Ridge,
    /// Explicit starting point: `mu` columns are filled with the given `pi`,
    /// noise from its closed form.
    Custom { beta: Vec<f64>, pi: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub variant: SolverVariant,
    /// Pruning threshold on the posterior mask column mean, in [0, 1).
    pub delta: f64,
    /// Iteration at which the hybrid variant switches from closed-form to
    /// gradient updates. Ignored by `Em` and `Eg`.
    pub switch_iteration: usize,
    /// Base learning coefficient for gradient steps; `None` selects the
    /// sample-size default `0.02 / N`.
    pub eta: Option<f64>,
    /// Largest allowed per-iteration movement of any `pi_k`; the realized
    /// step is rescaled when a proposal exceeds it.
    pub pi_step_cap: f64,
    pub max_iterations: usize,
    /// Stop when `|dG| / (|G| + 1)` falls below this between iterations
    /// without a pruning event.
    pub tolerance: f64,
    /// Gauss-Seidel passes per E-step.
    pub e_step_sweeps: usize,
    /// Recorded in manifests for reproducibility. The built-in init policies
    /// are deterministic and do not consume randomness.
    pub seed: u64,
    pub init: InitPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            variant: SolverVariant::Em,
            delta: f64::EPSILON,
            switch_iteration: 0,
            eta: None,
            pi_step_cap: 0.05,
            max_iterations: 10_000,
            tolerance: 1e-8,
            e_step_sweeps: 3,
            seed: 0,
            init: InitPolicy::Ridge,
        }
    }
}

impl SolverConfig {
    pub fn em() -> Self {
        Self::default()
    }

    pub fn eg() -> Self {
        Self { variant: SolverVariant::Eg, ..Self::default() }
    }

    pub fn hybrid(switch_iteration: usize) -> Self {
        Self { variant: SolverVariant::Hybrid, switch_iteration, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::InvalidInput(format!("delta must lie in [0, 1), got {}", self.delta)));
        }
        if let Some(eta) = self.eta {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::InvalidInput(format!("eta must be positive, got {eta}")));
            }
        }
        if !(self.pi_step_cap > 0.0) {
            return Err(Error::InvalidInput("pi_step_cap must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        if self.e_step_sweeps == 0 {
            return Err(Error::InvalidInput("e_step_sweeps must be positive".into()));
        }
        if let InitPolicy::Custom { beta, pi } = &self.init {
            if beta.len() != pi.len() {
                return Err(Error::LengthMismatch { left: beta.len(), right: pi.len() });
            }
            if pi.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
                return Err(Error::Domain("custom init pi must lie in (0, 1]".into()));
            }
            if beta.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidInput("custom init beta must be finite".into()));
            }
        }
        Ok(())
    }

    /// Base learning coefficient, resolving the sample-size default.
    pub fn base_eta(&self, n: usize) -> f64 {
        self.eta.unwrap_or(2e-2 / n as f64)
    }
}
