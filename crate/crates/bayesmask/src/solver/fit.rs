//! The full solver loop: initialize, then iterate E-step, pruning, and the
//! variant's parameter update until the objective stalls.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::error::Error;
use crate::model::{fic_terms_with, grad_with, BmState, FitResult, IterationRecord, Workspace};

use super::steps::{
    apply_direction, e_step_in_place, m_step_in_place, refresh_lambda, reparam_direction,
};
use super::{learning_coefficient, InitPolicy, SolverConfig, SolverVariant};

/// A fit that stopped on an error condition. The partial result carries the
/// history up to the failure; when every feature was pruned the final state
/// is empty and the expanded weights are all zero.
#[derive(Debug, Error)]
#[error("fit failed after {} iterations: {error}", partial.iterations())]
pub struct FitFailure {
    #[source]
    pub error: Error,
    pub partial: FitResult,
}

fn record(
    history: &mut Vec<IterationRecord>,
    iteration: usize,
    objective: f64,
    start: Instant,
    state: &BmState,
    k_original: usize,
) {
    let mut pi = vec![0.0; k_original];
    let mut beta = vec![0.0; k_original];
    for (slot, &j) in state.active.iter().enumerate() {
        pi[j] = state.pi[slot];
        beta[j] = state.beta[slot];
    }
    history.push(IterationRecord {
        iteration,
        objective,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        active_count: state.k_active(),
        pi,
        beta,
    });
}

fn initialize(data: &Dataset, config: &SolverConfig, lambda_floor: f64) -> Result<BmState, Error> {
    let n = data.n();
    let k = data.k();
    let (beta, pi, mu) = match &config.init {
        InitPolicy::Ridge => {
            let mut xtx = data.x().tr_mul(data.x());
            for j in 0..k {
                xtx[(j, j)] += 1e-6;
            }
            let beta = xtx
                .cholesky()
                .ok_or_else(|| Error::Singular("ridge-regularized Gram matrix".into()))?
                .solve(&data.x().tr_mul(data.y()));
            (beta, DVector::from_element(k, 0.95), DMatrix::from_element(n, k, 0.95))
        }
        InitPolicy::Custom { beta, pi } => {
            if beta.len() != k {
                return Err(Error::LengthMismatch { left: beta.len(), right: k });
            }
            let pi = DVector::from_vec(pi.clone());
            let mu = DMatrix::from_fn(n, k, |_, col| pi[col]);
            (DVector::from_vec(beta.clone()), pi, mu)
        }
    };
    let mut state = BmState::new(beta, 1.0, pi, mu, (0..k).collect())?;
    let ws = Workspace::new(&state, data);
    refresh_lambda(&mut state, &ws, data, lambda_floor)?;
    Ok(state)
}

/// Run the configured solver variant to convergence.
///
/// Each iteration performs the E-step, prunes features whose mask column
/// mean fell below `delta`, and then updates the parameters: closed forms
/// while the iteration count is within the hybrid switch point, gradient
/// steps (with the `pi` step cap) afterwards. Terminates when the relative
/// objective change between consecutive iterations without a pruning event
/// drops below `tolerance`, or at `max_iterations`.
///
/// Two boundary rules keep the loop total on extreme inputs: posterior means
/// of interior features are capped just below one so their column means stay
/// in the E-step's domain, and the closed-form noise variance is floored at
/// `eps^2 * mean(y^2)` so perfect interpolation converges instead of
/// degenerating.
pub fn fit(data: &Dataset, config: &SolverConfig) -> Result<FitResult, Box<FitFailure>> {
    let start = Instant::now();
    let k_original = data.k();
    let fail_no_history = |error: Error| {
        Box::new(FitFailure {
            error,
            partial: FitResult {
                state: BmState {
                    beta: DVector::zeros(0),
                    lambda: 1.0,
                    pi: DVector::zeros(0),
                    mu: DMatrix::zeros(data.n(), 0),
                    active: Vec::new(),
                },
                history: Vec::new(),
                pruned_at: BTreeMap::new(),
                k_original,
            },
        })
    };

    if let Err(e) = config.validate() {
        return Err(fail_no_history(e));
    }
    let n = data.n();
    let lambda_floor = f64::EPSILON * f64::EPSILON * (data.y().norm_squared() / n as f64);
    let mut state = match initialize(data, config, lambda_floor) {
        Ok(s) => s,
        Err(e) => return Err(fail_no_history(e)),
    };

    let switch_at = match config.variant {
        SolverVariant::Em => usize::MAX,
        SolverVariant::Eg => 0,
        SolverVariant::Hybrid => config.switch_iteration,
    };
    let eta = config.base_eta(n);

    let mut history = Vec::new();
    let mut pruned_at: BTreeMap<usize, usize> = BTreeMap::new();
    let ws0 = Workspace::new(&state, data);
    let mut prev_objective = fic_terms_with(&ws0, &state, data).total();
    record(&mut history, 0, prev_objective, start, &state, k_original);

    let fail = |error: Error,
                state: BmState,
                history: Vec<IterationRecord>,
                pruned_at: BTreeMap<usize, usize>| {
        Box::new(FitFailure {
            error,
            partial: FitResult { state, history, pruned_at, k_original },
        })
    };

    for it in 1..=config.max_iterations {
        let xa = data.gather_columns(&state.active);
        e_step_in_place(&mut state, &xa, data.y(), config.e_step_sweeps, true);

        let mut pruned_this_iteration = false;
        match super::prune(&state, config.delta) {
            Ok(outcome) => {
                if !outcome.dropped.is_empty() {
                    pruned_this_iteration = true;
                    for j in outcome.dropped {
                        pruned_at.insert(j, it);
                    }
                    state = outcome.state;
                }
            }
            Err(e) => {
                // Everything was pruned: terminate with an all-zero expanded
                // weight vector in the partial result.
                for &j in &state.active {
                    pruned_at.insert(j, it);
                }
                let empty = BmState {
                    beta: DVector::zeros(0),
                    lambda: state.lambda,
                    pi: DVector::zeros(0),
                    mu: DMatrix::zeros(n, 0),
                    active: Vec::new(),
                };
                record(&mut history, it, f64::NEG_INFINITY, start, &empty, k_original);
                return Err(fail(e, empty, history, pruned_at));
            }
        }

        let ws = Workspace::new(&state, data);
        let step_result = if it <= switch_at {
            m_step_in_place(&mut state, &ws, data, lambda_floor)
        } else {
            let (gb, gp) = grad_with(&ws, &state, data);
            let (db, dp) = reparam_direction(&state, &gb, &gp);
            let eta_t = learning_coefficient(&(&dp * eta), eta, config.pi_step_cap);
            apply_direction(&mut state, &db, &dp, eta_t);
            refresh_lambda(&mut state, &ws, data, lambda_floor)
        };
        if let Err(e) = step_result {
            return Err(fail(e, state, history, pruned_at));
        }

        let objective = fic_terms_with(&ws, &state, data).total();
        record(&mut history, it, objective, start, &state, k_original);

        if !pruned_this_iteration {
            let rel = (objective - prev_objective).abs() / (objective.abs() + 1.0);
            if rel < config.tolerance {
                break;
            }
        }
        prev_objective = objective;
    }

    Ok(FitResult { state, history, pruned_at, k_original })
}
