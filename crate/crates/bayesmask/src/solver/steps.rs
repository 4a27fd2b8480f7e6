//! Individual solver steps: mean-field E-step, closed-form M-step,
//! reparametrized gradient step, pruning, and step-size control.

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::{grad_with, BmState, Workspace};

/// Inside `fit`, posterior means of features with `pi < 1` are capped just
/// below one so column means stay strictly interior for the next E-step.
pub(crate) const MU_CAP: f64 = 1.0 - f64::EPSILON;
/// Lower clamp applied to `pi` after a gradient step; anything at the clamp
/// is far below every sensible pruning threshold and is removed next
/// iteration while `log(N pi)` stays finite.
pub(crate) const PI_CLAMP_MIN: f64 = 1e-12;
/// The gradient-step metric is singular at `beta = 0`; magnitudes below this
/// floor are replaced by the signed floor in the `pi/beta` and `1/beta^2`
/// factors, capping the `pi` acceleration while preserving its direction.
pub(crate) const BETA_FLOOR: f64 = 1e-8;

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

/// Gauss-Seidel passes over `mu` in fixed row-major order, using the latest
/// values within a pass. `fit_mode` enables the boundary rule (`pi = 1`
/// forces `mu = 1`, the coordinate argmax there) and the cap below one.
pub(crate) fn e_step_in_place(
    state: &mut BmState,
    xa: &DMatrix<f64>,
    y: &DVector<f64>,
    sweeps: usize,
    fit_mode: bool,
) {
    let n = xa.nrows();
    let k = state.k_active();
    let nf = n as f64;
    let lambda = state.lambda;

    // Per-feature shift: log-odds of the prior minus the shrinkage penalty.
    let shift: Vec<f64> =
        state.pi.iter().map(|&p| if p < 1.0 { logit(p) - 0.5 / (nf * p) } else { f64::NAN }).collect();

    // Residuals including every masked contribution.
    let mut resid = y - (xa.component_mul(&state.mu)) * &state.beta;

    for _ in 0..sweeps {
        for row in 0..n {
            let mut r = resid[row];
            for col in 0..k {
                let old = state.mu[(row, col)];
                let new = if state.pi[col] >= 1.0 {
                    debug_assert!(fit_mode, "boundary pi must be rejected before this point");
                    1.0
                } else {
                    let xb = xa[(row, col)] * state.beta[col];
                    let c = xb * lambda * (r + old * xb - 0.5 * xb);
                    let m = sigmoid(c + shift[col]);
                    if fit_mode && m > MU_CAP {
                        MU_CAP
                    } else {
                        m
                    }
                };
                r += (old - new) * xa[(row, col)] * state.beta[col];
                state.mu[(row, col)] = new;
            }
            resid[row] = r;
        }
    }
}

/// Posterior mask update. Every `mu_nk` moves to the fixed point
/// `sigmoid(c_nk + logit(pi_k) - 1/(2 N pi_k))`, where `c_nk` couples the
/// current residual to feature `k`; `beta`, `lambda`, `pi` are unchanged.
pub fn fab_e_step(state: &BmState, data: &Dataset, sweeps: usize) -> Result<BmState> {
    state.validate()?;
    if sweeps == 0 {
        return Err(Error::InvalidInput("sweeps must be positive".into()));
    }
    if state.pi.iter().any(|&p| p >= 1.0) {
        return Err(Error::Domain("e-step log-odds are undefined at pi = 1".into()));
    }
    let mut out = state.clone();
    let xa = data.gather_columns(&state.active);
    if xa.nrows() != data.n() || state.mu.nrows() != data.n() {
        return Err(Error::LengthMismatch { left: state.mu.nrows(), right: data.n() });
    }
    e_step_in_place(&mut out, &xa, data.y(), sweeps, false);
    Ok(out)
}

pub(crate) fn m_step_in_place(
    state: &mut BmState,
    ws: &Workspace,
    data: &Dataset,
    lambda_floor: f64,
) -> Result<()> {
    let n = data.n() as f64;
    let chol = ws
        .omega_matrix()
        .cholesky()
        .ok_or_else(|| Error::Singular("expected Gram matrix is not positive definite".into()))?;
    let beta = chol.solve(&ws.xty);
    let mut inv_lambda = ws.expected_sq_residual(&beta, data.y()) / n;
    if inv_lambda < lambda_floor {
        inv_lambda = lambda_floor;
    }
    if !(inv_lambda > 0.0) {
        return Err(Error::DegenerateNoise);
    }
    state.beta = beta;
    state.lambda = 1.0 / inv_lambda;
    for kk in 0..state.k_active() {
        // min() guards against summation overshoot pushing a mean above the
        // largest representable value below one.
        state.pi[kk] = if ws.t[kk] == 0.0 { 1.0 } else { (ws.s[kk] / n).min(MU_CAP) };
    }
    Ok(())
}

/// Closed-form parameter update: `beta` from the expected normal equations,
/// then the noise variance at the new `beta`, then `pi` at the mask column
/// means. `mu` is unchanged.
pub fn fab_m_step(state: &BmState, data: &Dataset) -> Result<BmState> {
    state.validate()?;
    let mut out = state.clone();
    let ws = Workspace::new(state, data);
    m_step_in_place(&mut out, &ws, data, 0.0)?;
    Ok(out)
}

/// Ascent direction per unit step under the reparametrized metric: the 2x2
/// inverse metric `[[1, -pi/b], [-pi/b, (1+pi^2)/b^2]]` applied to the
/// `(beta, pi)` gradient, with `b` the floored weight. Features at `pi = 1`
/// move only along `beta`.
pub(crate) fn reparam_direction(
    state: &BmState,
    grad_beta: &DVector<f64>,
    grad_pi: &DVector<f64>,
) -> (DVector<f64>, DVector<f64>) {
    let k = state.k_active();
    let mut dir_beta = DVector::zeros(k);
    let mut dir_pi = DVector::zeros(k);
    for kk in 0..k {
        let p = state.pi[kk];
        let gb = grad_beta[kk];
        if p >= 1.0 {
            dir_beta[kk] = gb;
            continue;
        }
        let b = floored_beta(state.beta[kk]);
        let gp = grad_pi[kk];
        dir_beta[kk] = gb - (p / b) * gp;
        dir_pi[kk] = -(p / b) * gb + ((1.0 + p * p) / (b * b)) * gp;
    }
    (dir_beta, dir_pi)
}

fn floored_beta(b: f64) -> f64 {
    if b.abs() >= BETA_FLOOR {
        b
    } else if b < 0.0 {
        -BETA_FLOOR
    } else {
        BETA_FLOOR
    }
}

pub(crate) fn apply_direction(
    state: &mut BmState,
    dir_beta: &DVector<f64>,
    dir_pi: &DVector<f64>,
    eta_t: f64,
) {
    for kk in 0..state.k_active() {
        state.beta[kk] += eta_t * dir_beta[kk];
        if state.pi[kk] < 1.0 {
            state.pi[kk] = (state.pi[kk] + eta_t * dir_pi[kk]).clamp(PI_CLAMP_MIN, 1.0);
        }
    }
}

pub(crate) fn refresh_lambda(
    state: &mut BmState,
    ws: &Workspace,
    data: &Dataset,
    lambda_floor: f64,
) -> Result<()> {
    let mut inv_lambda = ws.expected_sq_residual(&state.beta, data.y()) / data.n() as f64;
    if inv_lambda < lambda_floor {
        inv_lambda = lambda_floor;
    }
    if !(inv_lambda > 0.0) {
        return Err(Error::DegenerateNoise);
    }
    state.lambda = 1.0 / inv_lambda;
    Ok(())
}

/// One reparametrized gradient-ascent step of size `eta_t` on `(beta, pi)`,
/// followed by the closed-form noise update at the new weights. Features at
/// `pi = 1` update only their weight; the resulting `pi` is clamped to
/// `(0, 1]`.
pub fn fab_g_step(state: &BmState, data: &Dataset, eta_t: f64) -> Result<BmState> {
    state.validate()?;
    if !(eta_t.is_finite() && eta_t > 0.0) {
        return Err(Error::InvalidInput(format!("eta_t must be positive, got {eta_t}")));
    }
    let mut out = state.clone();
    let ws = Workspace::new(state, data);
    let (gb, gp) = grad_with(&ws, state, data);
    let (db, dp) = reparam_direction(state, &gb, &gp);
    apply_direction(&mut out, &db, &dp, eta_t);
    refresh_lambda(&mut out, &ws, data, 0.0)?;
    Ok(out)
}

/// Plain gradient ascent on `(beta, pi)` without the reparametrized metric;
/// the comparison baseline for trajectory studies. Same boundary handling
/// and noise refresh as [`fab_g_step`].
pub fn plain_gradient_step(state: &BmState, data: &Dataset, eta_t: f64) -> Result<BmState> {
    state.validate()?;
    if !(eta_t.is_finite() && eta_t > 0.0) {
        return Err(Error::InvalidInput(format!("eta_t must be positive, got {eta_t}")));
    }
    let mut out = state.clone();
    let ws = Workspace::new(state, data);
    let (gb, mut gp) = grad_with(&ws, state, data);
    for kk in 0..state.k_active() {
        if state.pi[kk] >= 1.0 {
            gp[kk] = 0.0;
        }
    }
    apply_direction(&mut out, &gb, &gp, eta_t);
    refresh_lambda(&mut out, &ws, data, 0.0)?;
    Ok(out)
}

/// Step-size control: returns the base `eta` untouched while every proposed
/// `|delta pi_k|` stays within `cap`, otherwise rescales so the realized
/// maximum movement is exactly `cap`.
pub fn learning_coefficient(proposed_pi_delta: &DVector<f64>, eta: f64, cap: f64) -> f64 {
    debug_assert!(eta > 0.0 && cap > 0.0);
    let max_step = proposed_pi_delta.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    if max_step <= cap || max_step == 0.0 {
        eta
    } else {
        eta * cap / max_step
    }
}

/// Result of a pruning pass: the surviving state and the original indices of
/// the removed features.
#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub state: BmState,
    pub dropped: Vec<usize>,
}

/// Remove every feature whose posterior mask column mean is below `delta`.
pub fn prune(state: &BmState, delta: f64) -> Result<PruneOutcome> {
    let n = state.mu.nrows() as f64;
    let k = state.k_active();
    let mut keep = Vec::with_capacity(k);
    let mut dropped = Vec::new();
    for kk in 0..k {
        if state.mu.column(kk).sum() / n < delta {
            dropped.push(state.active[kk]);
        } else {
            keep.push(kk);
        }
    }
    if keep.len() == k {
        return Ok(PruneOutcome { state: state.clone(), dropped });
    }
    if keep.is_empty() {
        return Err(Error::EmptyModel);
    }
    let mut mu = DMatrix::zeros(state.mu.nrows(), keep.len());
    for (slot, &kk) in keep.iter().enumerate() {
        mu.set_column(slot, &state.mu.column(kk));
    }
    let out = BmState {
        beta: DVector::from_fn(keep.len(), |i, _| state.beta[keep[i]]),
        lambda: state.lambda,
        pi: DVector::from_fn(keep.len(), |i, _| state.pi[keep[i]]),
        mu,
        active: keep.iter().map(|&kk| state.active[kk]).collect(),
    };
    Ok(PruneOutcome { state: out, dropped })
}
