//! Learning-trajectory study on the two-feature design.
//!
//! Tracks `(beta_1, pi_1)` of the irrelevant feature under three update
//! rules from a grid of starting points, with the relevant feature's
//! parameters started at their true values. Gradient variants use a fixed
//! learning coefficient, as in the study this reproduces; closed-form
//! updates have none.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{grad_with, BmState, Workspace};
use crate::solver::{
    apply_direction, e_step_in_place, m_step_in_place, prune, refresh_lambda, reparam_direction,
};

use super::gen_toy_with_noise;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryAlgorithm {
    /// Closed-form updates.
    Em,
    /// Reparametrized gradient updates.
    Eg,
    /// Plain gradient updates on `(beta, pi)`.
    EgNoReparam,
}

impl TrajectoryAlgorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrajectoryAlgorithm::Em => "em",
            TrajectoryAlgorithm::Eg => "eg",
            TrajectoryAlgorithm::EgNoReparam => "eg_no_reparam",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub algorithm: TrajectoryAlgorithm,
    pub initial_beta1: f64,
    pub initial_pi1: f64,
    /// `(beta_1, pi_1)` per iteration, starting with the initial point.
    pub path: Vec<(f64, f64)>,
    /// Iteration at which the irrelevant feature was pruned, if within
    /// budget.
    pub pruned_at_iteration: Option<usize>,
}

/// Noise-precision protocol during a trajectory run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TrajectoryLambda {
    /// Closed-form refresh every iteration.
    Refresh,
    /// Closed form once at the initial state, then frozen.
    FreezeInit,
    /// Known value held fixed.
    Fixed { value: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    pub budget: usize,
    /// Fixed learning coefficient for the reparametrized variant.
    pub eta_reparam: f64,
    /// Fixed learning coefficient for the plain-gradient variant.
    pub eta_plain: f64,
    pub e_step_sweeps: usize,
    pub delta: f64,
    pub noise_variance: f64,
    pub lambda: TrajectoryLambda,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            budget: 50_000,
            eta_reparam: 2e-6,
            eta_plain: 2e-4,
            e_step_sweeps: 3,
            delta: f64::EPSILON,
            noise_variance: 0.005,
            lambda: TrajectoryLambda::Refresh,
        }
    }
}

/// Ten starting points on a diagonal through the singular-region
/// neighbourhood: `(0.02 i, 0.09 i + 0.05)` for `i = 1..=10`.
///
/// The weight coordinate stays within [0.02, 0.2]; much larger starting
/// weights are so strongly rejected by the data that the posterior masks
/// collapse in the first few sweeps and every update rule prunes quickly,
/// which defeats the purpose of the study.
pub fn default_initial_points() -> Vec<(f64, f64)> {
    (1..=10).map(|i| (0.02 * i as f64, 0.09 * i as f64 + 0.05)).collect()
}

fn run_single(
    data: &crate::Dataset,
    algorithm: TrajectoryAlgorithm,
    start: (f64, f64),
    opts: &TrajectoryOptions,
) -> Result<TrajectoryRecord> {
    let (b1, p1) = start;
    if !(b1 > 0.0 && p1 > 0.0 && p1 < 1.0) {
        return Err(Error::InvalidInput(format!(
            "initial point must satisfy beta > 0 and 0 < pi < 1, got ({b1}, {p1})"
        )));
    }
    let n = data.n();
    let lambda_floor =
        f64::EPSILON * f64::EPSILON * (data.y().norm_squared() / n as f64);

    // Irrelevant feature at the grid point, relevant feature at its truth.
    let pi = DVector::from_vec(vec![p1, 1.0]);
    let mu = DMatrix::from_fn(n, 2, |_, col| pi[col]);
    let mut state =
        BmState::new(DVector::from_vec(vec![b1, 1.0]), 1.0, pi, mu, vec![0, 1])?;
    match opts.lambda {
        TrajectoryLambda::Refresh | TrajectoryLambda::FreezeInit => {
            let ws = Workspace::new(&state, data);
            refresh_lambda(&mut state, &ws, data, lambda_floor)?;
        }
        TrajectoryLambda::Fixed { value } => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidInput(format!("fixed lambda must be positive, got {value}")));
            }
            state.lambda = value;
        }
    }
    let refresh = opts.lambda == TrajectoryLambda::Refresh;

    let mut record = TrajectoryRecord {
        algorithm,
        initial_beta1: b1,
        initial_pi1: p1,
        path: vec![(b1, p1)],
        pruned_at_iteration: None,
    };

    for it in 1..=opts.budget {
        let xa = data.gather_columns(&state.active);
        e_step_in_place(&mut state, &xa, data.y(), opts.e_step_sweeps, true);

        match prune(&state, opts.delta) {
            Ok(outcome) => {
                if outcome.dropped.contains(&0) {
                    record.pruned_at_iteration = Some(it);
                    break;
                }
                state = outcome.state;
            }
            Err(Error::EmptyModel) => {
                record.pruned_at_iteration = Some(it);
                break;
            }
            Err(e) => return Err(e),
        }

        let ws = Workspace::new(&state, data);
        match algorithm {
            TrajectoryAlgorithm::Em => m_step_in_place(&mut state, &ws, data, lambda_floor)?,
            TrajectoryAlgorithm::Eg => {
                let (gb, gp) = grad_with(&ws, &state, data);
                let (db, dp) = reparam_direction(&state, &gb, &gp);
                apply_direction(&mut state, &db, &dp, opts.eta_reparam);
                if refresh {
                    refresh_lambda(&mut state, &ws, data, lambda_floor)?;
                }
            }
            TrajectoryAlgorithm::EgNoReparam => {
                let (gb, mut gp) = grad_with(&ws, &state, data);
                for kk in 0..state.k_active() {
                    if state.pi[kk] >= 1.0 {
                        gp[kk] = 0.0;
                    }
                }
                apply_direction(&mut state, &gb, &gp, opts.eta_plain);
                if refresh {
                    refresh_lambda(&mut state, &ws, data, lambda_floor)?;
                }
            }
        }

        let slot = state
            .active
            .iter()
            .position(|&j| j == 0)
            .expect("irrelevant feature still active");
        record.path.push((state.beta[slot], state.pi[slot]));
    }
    Ok(record)
}

/// Run all three algorithms from every initial point on one toy dataset of
/// `n_samples` rows.
pub fn run_trajectories(
    seed: u64,
    n_samples: usize,
    initial_points: &[(f64, f64)],
    opts: &TrajectoryOptions,
) -> Result<Vec<TrajectoryRecord>> {
    if n_samples < 2 || n_samples % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "n_samples must be a positive even number, got {n_samples}"
        )));
    }
    if initial_points.is_empty() {
        return Err(Error::InvalidInput("need at least one initial point".into()));
    }
    let data = gen_toy_with_noise(seed, n_samples / 2, opts.noise_variance);
    let mut out = Vec::with_capacity(3 * initial_points.len());
    for &point in initial_points {
        for algorithm in
            [TrajectoryAlgorithm::Em, TrajectoryAlgorithm::Eg, TrajectoryAlgorithm::EgNoReparam]
        {
            out.push(run_single(&data, algorithm, point, opts)?);
        }
    }
    Ok(out)
}

/// Write one CSV per algorithm (`trajectory_<alg>.csv`: point, iteration,
/// beta1, pi1) plus a summary with iterations-to-prune per run.
pub fn write_trajectory_csvs(records: &[TrajectoryRecord], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for algorithm in
        [TrajectoryAlgorithm::Em, TrajectoryAlgorithm::Eg, TrajectoryAlgorithm::EgNoReparam]
    {
        let path = dir.join(format!("trajectory_{}.csv", algorithm.as_str()));
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "point,initial_beta1,initial_pi1,iteration,beta1,pi1")?;
        for (point_ix, rec) in
            records.iter().filter(|r| r.algorithm == algorithm).enumerate()
        {
            for (it, (b, p)) in rec.path.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    point_ix, rec.initial_beta1, rec.initial_pi1, it, b, p
                )?;
            }
        }
        w.flush()?;
    }

    let mut w = BufWriter::new(File::create(dir.join("trajectory_summary.csv"))?);
    writeln!(w, "algorithm,initial_beta1,initial_pi1,pruned_at_iteration,path_length")?;
    for rec in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            rec.algorithm.as_str(),
            rec.initial_beta1,
            rec.initial_pi1,
            rec.pruned_at_iteration.map(|i| i.to_string()).unwrap_or_default(),
            rec.path.len()
        )?;
    }
    w.flush()?;
    Ok(())
}
