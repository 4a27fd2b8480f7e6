//! Masked-regression model state and its variational objective.
//!
//! The model inserts a binary mask `z_nk ~ Bern(pi_k)` between every design
//! entry and its weight, so the likelihood mean for sample `n` is
//! `sum_k x_nk z_nk beta_k`. Inference keeps a mean-field posterior
//! `q(z_nk) = Bern(mu_nk)` and maximizes an asymptotic lower bound `G` on the
//! marginal log-likelihood. `G` decomposes into five terms:
//!
//! 1. expected Gaussian log-likelihood under `q`,
//! 2. expected mask prior `E_q[log p(Z|pi)]`,
//! 3. a complexity penalty `-1/2 sum_k (log(N pi_k) + (mean_n mu_nk - pi_k)/pi_k)`
//!    that drives irrelevant masking rates to zero,
//! 4. the dimension penalty `-(K+1)/2 log N` over the active feature count,
//! 5. the entropy of `q`.
//!
//! The terms are accumulated separately (see [`FicTerms`]) so tests and debug
//! output can inspect each one; the contract is their sum.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

const LN_2PI: f64 = 1.8378770664093453;

/// Full parameter set of the masked model over the currently active features.
///
/// `beta`, `pi` and the columns of `mu` are indexed by the *active slot*;
/// `active[slot]` gives the original feature index. Pruning shrinks all four
/// in lockstep.
#[derive(Debug, Clone, PartialEq)]
pub struct BmState {
    /// Weight vector, one entry per active feature.
    pub beta: DVector<f64>,
    /// Noise precision, strictly positive.
    pub lambda: f64,
    /// Masking priors, entries in (0, 1].
    pub pi: DVector<f64>,
    /// Posterior mask means, N rows by K_active columns, entries in [0, 1].
    pub mu: DMatrix<f64>,
    /// Original feature index for each active slot, strictly increasing.
    pub active: Vec<usize>,
}

impl BmState {
    pub fn new(
        beta: DVector<f64>,
        lambda: f64,
        pi: DVector<f64>,
        mu: DMatrix<f64>,
        active: Vec<usize>,
    ) -> Result<Self> {
        let state = Self { beta, lambda, pi, mu, active };
        state.validate()?;
        Ok(state)
    }

    /// Check the type invariants; cheap relative to any solver step.
    pub fn validate(&self) -> Result<()> {
        let k = self.active.len();
        if self.beta.len() != k || self.pi.len() != k || self.mu.ncols() != k {
            return Err(Error::InvalidInput(format!(
                "inconsistent active dimensions: beta {}, pi {}, mu cols {}, active {}",
                self.beta.len(),
                self.pi.len(),
                self.mu.ncols(),
                k
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("beta contains NaN or infinite entries".into()));
        }
        if self.pi.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::Domain("every pi_k must lie in (0, 1]".into()));
        }
        if self.mu.iter().any(|&m| !(0.0..=1.0).contains(&m)) {
            return Err(Error::Domain("every mu_nk must lie in [0, 1]".into()));
        }
        if self.active.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("active indices must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Active feature count.
    pub fn k_active(&self) -> usize {
        self.active.len()
    }

    fn check_against(&self, data: &Dataset) -> Result<()> {
        if self.mu.nrows() != data.n() {
            return Err(Error::LengthMismatch { left: self.mu.nrows(), right: data.n() });
        }
        if let Some(&last) = self.active.last() {
            if last >= data.k() {
                return Err(Error::InvalidInput(format!(
                    "active index {last} out of range for {} features",
                    data.k()
                )));
            }
        }
        Ok(())
    }
}

/// One row of a fit trajectory. `beta` and `pi` are expanded to the original
/// feature indexing, with pruned features reported as exact zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub elapsed_seconds: f64,
    pub active_count: usize,
    pub pi: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Outcome of a solver run: final state, per-iteration history, and the
/// iteration at which each pruned feature was removed.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub state: BmState,
    pub history: Vec<IterationRecord>,
    /// Original feature index -> iteration of its pruning event.
    pub pruned_at: std::collections::BTreeMap<usize, usize>,
    /// Feature count of the dataset the fit started from.
    pub k_original: usize,
}

impl FitResult {
    /// Final weights mapped back to original indices; pruned features are 0.0.
    pub fn expanded_beta(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.k_original);
        for (slot, &j) in self.state.active.iter().enumerate() {
            out[j] = self.state.beta[slot];
        }
        out
    }

    /// Final masking priors mapped back to original indices; pruned are 0.0.
    pub fn expanded_pi(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.k_original);
        for (slot, &j) in self.state.active.iter().enumerate() {
            out[j] = self.state.pi[slot];
        }
        out
    }

    /// True where the feature was pruned (estimated irrelevant).
    pub fn zero_mask(&self) -> Vec<bool> {
        (0..self.k_original).map(|j| self.pruned_at.contains_key(&j)).collect()
    }

    pub fn final_objective(&self) -> f64 {
        self.history.last().map(|r| r.objective).unwrap_or(f64::NAN)
    }

    pub fn iterations(&self) -> usize {
        self.history.last().map(|r| r.iteration).unwrap_or(0)
    }
}

/// The five summands of the lower bound, exposed for inspection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FicTerms {
    pub expected_log_likelihood: f64,
    pub mask_prior: f64,
    pub shrinkage_penalty: f64,
    pub dimension_penalty: f64,
    pub entropy: f64,
}

impl FicTerms {
    pub fn total(&self) -> f64 {
        self.expected_log_likelihood
            + self.mask_prior
            + self.shrinkage_penalty
            + self.dimension_penalty
            + self.entropy
    }
}

/// Second moment `E_q[z z^T]` of a Bernoulli mean-field row: `mu mu^T` with
/// the diagonal replaced by `mu` (masks are idempotent, `z^2 = z`).
pub fn bernoulli_second_moment(mu_row: &DVector<f64>) -> DMatrix<f64> {
    debug_assert!(mu_row.iter().all(|&m| (0.0..=1.0).contains(&m)));
    let mut out = mu_row * mu_row.transpose();
    for (i, &m) in mu_row.iter().enumerate() {
        out[(i, i)] = m;
    }
    out
}

pub(crate) fn binary_entropy(mu: f64) -> f64 {
    // 0 * log 0 = 0 convention at both endpoints.
    let mut h = 0.0;
    if mu > 0.0 {
        h -= mu * mu.ln();
    }
    if mu < 1.0 {
        h -= (1.0 - mu) * (-mu).ln_1p();
    }
    h
}

/// Per-iteration sufficient statistics over the active columns.
///
/// `omega = sum_n (x_n x_n^T) .* E_q[z_n z_n^T]` equals
/// `xt^T xt + diag(d)` with `xt = X .* M` and
/// `d_k = sum_n x_nk^2 mu_nk (1 - mu_nk)`. The dense Gram matrix costs
/// O(N K^2) and is only needed by the closed-form weight solve; everything
/// else (objective, gradients, noise refresh) goes through O(N K)
/// matrix-vector products, so it is assembled on demand.
pub(crate) struct Workspace {
    /// Masked design `X .* M`.
    pub xt: DMatrix<f64>,
    /// `xt^T y`.
    pub xty: DVector<f64>,
    /// Diagonal mask-variance correction `d`.
    pub d: DVector<f64>,
    /// Column sums of `mu`.
    pub s: DVector<f64>,
    /// Column sums of `1 - mu` (exactly zero only when a column is all ones).
    pub t: DVector<f64>,
}

impl Workspace {
    pub fn new(state: &BmState, data: &Dataset) -> Self {
        let n = data.n();
        let k = state.k_active();
        let xa = data.gather_columns(&state.active);
        let xt = xa.component_mul(&state.mu);
        let xty = xt.tr_mul(data.y());
        let mut d = DVector::zeros(k);
        let mut s = DVector::zeros(k);
        let mut t = DVector::zeros(k);
        for kk in 0..k {
            let mut dk = 0.0;
            let mut sk = 0.0;
            let mut tk = 0.0;
            for nn in 0..n {
                let m = state.mu[(nn, kk)];
                let x = xa[(nn, kk)];
                dk += x * x * m * (1.0 - m);
                sk += m;
                tk += 1.0 - m;
            }
            d[kk] = dk;
            s[kk] = sk;
            t[kk] = tk;
        }
        Self { xt, xty, d, s, t }
    }

    /// Dense expected Gram matrix for the closed-form weight solve.
    pub fn omega_matrix(&self) -> DMatrix<f64> {
        // transpose + mul dispatches to the blocked kernel; tr_mul does not.
        let mut omega = self.xt.transpose() * &self.xt;
        for kk in 0..self.d.len() {
            omega[(kk, kk)] += self.d[kk];
        }
        omega
    }

    /// `omega * beta` without forming the Gram matrix.
    pub fn omega_apply(&self, beta: &DVector<f64>) -> DVector<f64> {
        let mut out = self.xt.tr_mul(&(&self.xt * beta));
        for kk in 0..beta.len() {
            out[kk] += self.d[kk] * beta[kk];
        }
        out
    }

    /// Expected squared residual `E_q || y - (X .* Z) beta ||^2`, accumulated
    /// in its sum-of-squares form so it cannot go negative by cancellation.
    pub fn expected_sq_residual(&self, beta: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let r = y - &self.xt * beta;
        let mut q = r.norm_squared();
        for kk in 0..beta.len() {
            q += self.d[kk] * beta[kk] * beta[kk];
        }
        q
    }
}

pub(crate) fn fic_terms_with(ws: &Workspace, state: &BmState, data: &Dataset) -> FicTerms {
    let n = data.n() as f64;
    let k = state.k_active();
    let ln_n = n.ln();

    let q = ws.expected_sq_residual(&state.beta, data.y());
    let expected_log_likelihood =
        0.5 * n * (state.lambda.ln() - LN_2PI) - 0.5 * state.lambda * q;

    let mut mask_prior = 0.0;
    let mut shrinkage_penalty = 0.0;
    for kk in 0..k {
        let p = state.pi[kk];
        let s = ws.s[kk];
        let t = ws.t[kk];
        mask_prior += s * p.ln();
        if t != 0.0 {
            // 0 * log 0 = 0: columns with every mu_nk = 1 contribute nothing
            // even at pi = 1.
            mask_prior += t * (-p).ln_1p();
        }
        shrinkage_penalty -= 0.5 * ((n * p).ln() + (s / n - p) / p);
    }

    let dimension_penalty = -0.5 * (k as f64 + 1.0) * ln_n;
    let entropy = state.mu.iter().map(|&m| binary_entropy(m)).sum();

    FicTerms {
        expected_log_likelihood,
        mask_prior,
        shrinkage_penalty,
        dimension_penalty,
        entropy,
    }
}

fn require_positive_pi(state: &BmState) -> Result<()> {
    if let Some(p) = state.pi.iter().find(|&&p| p <= 0.0) {
        return Err(Error::Domain(format!("pi must be positive, got {p}")));
    }
    Ok(())
}

/// The five objective terms evaluated separately.
pub fn fic_terms(state: &BmState, data: &Dataset) -> Result<FicTerms> {
    require_positive_pi(state)?;
    state.check_against(data)?;
    Ok(fic_terms_with(&Workspace::new(state, data), state, data))
}

/// Variational lower bound `G` maximized by every solver variant.
pub fn fic_lower_bound(state: &BmState, data: &Dataset) -> Result<f64> {
    Ok(fic_terms(state, data)?.total())
}

pub(crate) fn grad_with(
    ws: &Workspace,
    state: &BmState,
    data: &Dataset,
) -> (DVector<f64>, DVector<f64>) {
    let n = data.n() as f64;
    let k = state.k_active();

    let mut grad_beta = &ws.xty - ws.omega_apply(&state.beta);
    grad_beta *= state.lambda;

    let mut grad_pi = DVector::zeros(k);
    for kk in 0..k {
        let p = state.pi[kk];
        let s = ws.s[kk];
        let t = ws.t[kk];
        let mut g = s / p;
        if t != 0.0 {
            // At pi = 1 with any mu < 1 this is -inf, matching the objective.
            g -= t / (1.0 - p);
        }
        g -= 0.5 * (1.0 / p - s / (n * p * p));
        grad_pi[kk] = g;
    }
    (grad_beta, grad_pi)
}

/// Analytic partial derivatives of `G` with respect to `beta` and `pi`.
///
/// The `beta` gradient touches only the expected log-likelihood; the `pi`
/// gradient touches the mask prior and the shrinkage penalty. At `pi_k = 1`
/// the `pi` gradient is only meaningful when the whole `mu` column is 1
/// (boundary handling is the caller's concern).
pub fn grad_beta_pi(state: &BmState, data: &Dataset) -> Result<(DVector<f64>, DVector<f64>)> {
    require_positive_pi(state)?;
    state.check_against(data)?;
    let ws = Workspace::new(state, data);
    Ok(grad_with(&ws, state, data))
}
