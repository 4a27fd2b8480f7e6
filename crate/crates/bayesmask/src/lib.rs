//! Sparse linear regression by Bayesian masking.
//!
//! Instead of regularizing weights, the model masks each design entry with a
//! per-sample Bernoulli latent variable whose per-feature prior rate `pi_k`
//! measures relevance. Maximizing an asymptotic lower bound on the marginal
//! log-likelihood drives the rates of irrelevant features to zero and prunes
//! them, without shrinking the surviving weights.
//!
//! The crate provides:
//!
//! * [`model`] — the state types, the lower-bound objective, and its
//!   gradients;
//! * [`solver`] — the EM, gradient, and hybrid maximizers with automatic
//!   pruning;
//! * [`baselines`] — least squares, Lasso (analytic 1D and coordinate
//!   descent with cross-validation), and ARD for comparison;
//! * [`analysis`] — the estimator-bias identity, the 1D masked estimator,
//!   and selection-quality scoring;
//! * [`experiments`] — synthetic generators and benchmark drivers with CSV
//!   and JSON outputs.
//!
//! The `examples/` directory walks through each capability; the `bayesmask`
//! binary exposes the experiment drivers as subcommands.

pub mod analysis;
pub mod baselines;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod solver;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use model::{fic_lower_bound, fic_terms, grad_beta_pi, BmState, FicTerms, FitResult};
pub use solver::{fit, FitFailure, InitPolicy, SolverConfig, SolverVariant};

/// Version string recorded in output manifests.
pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Git revision captured at build time, or "unknown" outside a checkout.
pub fn git_revision() -> &'static str {
    env!("BAYESMASK_GIT_HASH")
}
