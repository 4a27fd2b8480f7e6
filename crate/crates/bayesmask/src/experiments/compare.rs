//! Method comparison over repeated synthetic datasets.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{score_selection, SelectionScore};
use crate::baselines::{ard_fit, default_alpha_grid, lasso_cv};
use crate::error::{Error, Result};
use crate::io::fmt_opt;
use crate::solver::fit;

use super::{derive_seed, gen_toy_with_noise, gen_uniform_with_noise, ExperimentKind, ExperimentSpec};

const DOMAIN_DATA: u64 = 1;
const DOMAIN_CV: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    Bm,
    Lasso,
    Ard,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::Bm => "bm",
            MethodTag::Lasso => "lasso",
            MethodTag::Ard => "ard",
        }
    }
}

/// One method's outcome on one generated dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: MethodTag,
    pub data_seed: u64,
    pub score: Option<SelectionScore>,
    /// Whether the first truly irrelevant feature was pruned (the quantity
    /// plotted for the two-feature study).
    pub pruned_first_irrelevant: Option<bool>,
    /// Mean fitted weight over the truly relevant features.
    pub relevant_beta_mean: Option<f64>,
    /// Mean signed error over the truly relevant features.
    pub relevant_error_mean: Option<f64>,
    /// Solver iterations (masking fits only).
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

/// Per-method summary across trials. Means and standard errors are over the
/// trials where the metric is defined; `n_*` counts those trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: MethodTag,
    pub trials: usize,
    pub trials_scored: usize,
    pub prune_freq: Option<f64>,
    pub prune_ci_low: Option<f64>,
    pub prune_ci_high: Option<f64>,
    pub n_precision: usize,
    pub mean_precision: Option<f64>,
    pub se_precision: Option<f64>,
    pub n_recall: usize,
    pub mean_recall: Option<f64>,
    pub se_recall: Option<f64>,
    pub n_f1: usize,
    pub mean_f1: Option<f64>,
    pub se_f1: Option<f64>,
    pub n_relevant_beta: usize,
    pub mean_relevant_beta: Option<f64>,
    pub se_relevant_beta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub spec: ExperimentSpec,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Vec<MethodAggregate>,
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Some((mean, (var / n).sqrt()))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn first_irrelevant(data: &crate::Dataset) -> Option<usize> {
    data.true_irrelevant().and_then(|set| set.iter().next().copied())
}

fn score_against_truth(
    data: &crate::Dataset,
    est_mask: &[bool],
) -> (Option<SelectionScore>, Option<bool>) {
    let Some(truth) = data.truth_zero_mask() else {
        return (None, None);
    };
    let score = score_selection(est_mask, &truth).ok();
    let first = first_irrelevant(data).map(|j| est_mask[j]);
    (score, first)
}

fn relevant_stats(data: &crate::Dataset, beta_hat: &nalgebra::DVector<f64>) -> (Option<f64>, Option<f64>) {
    let (Some(truth), Some(beta_star)) = (data.true_irrelevant(), data.true_beta()) else {
        return (None, None);
    };
    let mut betas = Vec::new();
    let mut errs = Vec::new();
    for j in 0..data.k() {
        if !truth.contains(&j) {
            betas.push(beta_hat[j]);
            errs.push(beta_hat[j] - beta_star[j]);
        }
    }
    let mean = |v: &Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    (mean(&betas), mean(&errs))
}

fn run_trial(spec: &ExperimentSpec, trial: usize) -> Vec<TrialRecord> {
    let data_seed = derive_seed(spec.seed, DOMAIN_DATA, trial as u64);
    let cv_seed = derive_seed(spec.seed, DOMAIN_CV, trial as u64);
    let data = match spec.kind {
        ExperimentKind::ToyK2 => {
            gen_toy_with_noise(data_seed, spec.sample_multiplier, spec.noise_variance)
        }
        ExperimentKind::UniformK => {
            gen_uniform_with_noise(data_seed, spec.k, spec.sample_multiplier, spec.noise_variance)
        }
    };
    let lambda_known = 1.0 / spec.noise_variance;
    let blank = |method| TrialRecord {
        trial,
        method,
        data_seed,
        score: None,
        pruned_first_irrelevant: None,
        relevant_beta_mean: None,
        relevant_error_mean: None,
        iterations: None,
        error: None,
    };

    let mut bm_row = blank(MethodTag::Bm);
    match fit(&data, &spec.solver) {
        Ok(result) => {
            let mask = result.zero_mask();
            let (score, first) = score_against_truth(&data, &mask);
            let expanded = result.expanded_beta();
            let (beta_mean, err_mean) = relevant_stats(&data, &expanded);
            bm_row.score = score;
            bm_row.pruned_first_irrelevant = first;
            bm_row.relevant_beta_mean = beta_mean;
            bm_row.relevant_error_mean = err_mean;
            bm_row.iterations = Some(result.iterations());
        }
        Err(failure) => {
            // An empty model is still a complete selection decision: every
            // feature was declared irrelevant.
            if matches!(failure.error, Error::EmptyModel) {
                let mask = failure.partial.zero_mask();
                let (score, first) = score_against_truth(&data, &mask);
                bm_row.score = score;
                bm_row.pruned_first_irrelevant = first;
                bm_row.iterations = Some(failure.partial.iterations());
            }
            bm_row.error = Some(failure.error.to_string());
        }
    }

    let grid = spec
        .baseline
        .alpha_grid
        .clone()
        .unwrap_or_else(|| default_alpha_grid(data.n()));
    let mut lasso_row = blank(MethodTag::Lasso);
    match lasso_cv(&data, lambda_known, spec.baseline.folds, &grid, cv_seed) {
        Ok(est) => {
            let mask = est.zero_mask();
            let (score, first) = score_against_truth(&data, &mask);
            let (beta_mean, err_mean) = relevant_stats(&data, &est.beta_hat);
            lasso_row.score = score;
            lasso_row.pruned_first_irrelevant = first;
            lasso_row.relevant_beta_mean = beta_mean;
            lasso_row.relevant_error_mean = err_mean;
        }
        Err(e) => lasso_row.error = Some(e.to_string()),
    }

    let mut ard_row = blank(MethodTag::Ard);
    match ard_fit(&data, lambda_known, spec.baseline.ard_tol) {
        Ok(est) => {
            let mask = est.zero_mask();
            let (score, first) = score_against_truth(&data, &mask);
            let (beta_mean, err_mean) = relevant_stats(&data, &est.beta_hat);
            ard_row.score = score;
            ard_row.pruned_first_irrelevant = first;
            ard_row.relevant_beta_mean = beta_mean;
            ard_row.relevant_error_mean = err_mean;
        }
        Err(e) => ard_row.error = Some(e.to_string()),
    }

    vec![bm_row, lasso_row, ard_row]
}

fn aggregate(method: MethodTag, rows: &[&TrialRecord]) -> MethodAggregate {
    let trials = rows.len();
    let scored: Vec<&&TrialRecord> = rows.iter().filter(|r| r.score.is_some()).collect();
    let collect = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Vec<f64> {
        rows.iter().filter_map(|r| f(r)).collect()
    };
    let precision = collect(&|r| r.score.and_then(|s| s.precision));
    let recall = collect(&|r| r.score.and_then(|s| s.recall));
    let f1 = collect(&|r| r.score.and_then(|s| s.f1));
    let rel_beta = collect(&|r| r.relevant_beta_mean);

    let prune_counts: Vec<bool> =
        rows.iter().filter_map(|r| r.pruned_first_irrelevant).collect();
    let (prune_freq, ci) = if prune_counts.is_empty() {
        (None, None)
    } else {
        let hits = prune_counts.iter().filter(|&&b| b).count();
        let freq = hits as f64 / prune_counts.len() as f64;
        (Some(freq), Some(wilson_interval(hits, prune_counts.len(), 1.959963984540054)))
    };

    let (mean_precision, se_precision) = mean_and_se(&precision).unzip();
    let (mean_recall, se_recall) = mean_and_se(&recall).unzip();
    let (mean_f1, se_f1) = mean_and_se(&f1).unzip();
    let (mean_relevant_beta, se_relevant_beta) = mean_and_se(&rel_beta).unzip();

    MethodAggregate {
        method,
        trials,
        trials_scored: scored.len(),
        prune_freq,
        prune_ci_low: ci.map(|c| c.0),
        prune_ci_high: ci.map(|c| c.1),
        n_precision: precision.len(),
        mean_precision,
        se_precision,
        n_recall: recall.len(),
        mean_recall,
        se_recall,
        n_f1: f1.len(),
        mean_f1,
        se_f1,
        n_relevant_beta: rel_beta.len(),
        mean_relevant_beta,
        se_relevant_beta,
    }
}

/// Run every trial (in parallel, merged by trial index), fit all three
/// methods per dataset, and aggregate. Individual failures are recorded on
/// their rows and never abort the batch.
pub fn run_comparison(spec: &ExperimentSpec) -> Result<ComparisonReport> {
    spec.validate()?;
    let trials: Vec<TrialRecord> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, t))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let aggregates = [MethodTag::Bm, MethodTag::Lasso, MethodTag::Ard]
        .into_iter()
        .map(|m| {
            let rows: Vec<&TrialRecord> = trials.iter().filter(|r| r.method == m).collect();
            aggregate(m, &rows)
        })
        .collect();

    Ok(ComparisonReport { spec: spec.clone(), trials, aggregates })
}

impl ComparisonReport {
    pub fn aggregate_for(&self, method: MethodTag) -> &MethodAggregate {
        self.aggregates.iter().find(|a| a.method == method).expect("all methods aggregated")
    }
}

/// Write `trials.csv`, `aggregate.csv`, and `manifest.json` under `dir`.
pub fn write_comparison_csvs(report: &ComparisonReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut w = BufWriter::new(File::create(dir.join("trials.csv"))?);
    writeln!(
        w,
        "trial,method,data_seed,m1,m2,m3,precision,recall,f1,\
         pruned_first_irrelevant,relevant_beta_mean,relevant_error_mean,iterations,error"
    )?;
    for r in &report.trials {
        let (m1, m2, m3) = r
            .score
            .map(|s| (s.m1.to_string(), s.m2.to_string(), s.m3.to_string()))
            .unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.method.as_str(),
            r.data_seed,
            m1,
            m2,
            m3,
            fmt_opt(r.score.and_then(|s| s.precision)),
            fmt_opt(r.score.and_then(|s| s.recall)),
            fmt_opt(r.score.and_then(|s| s.f1)),
            r.pruned_first_irrelevant.map(|b| b.to_string()).unwrap_or_default(),
            fmt_opt(r.relevant_beta_mean),
            fmt_opt(r.relevant_error_mean),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            r.error.as_deref().unwrap_or(""),
        )?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(dir.join("aggregate.csv"))?);
    writeln!(
        w,
        "method,trials,trials_scored,prune_freq,prune_ci_low,prune_ci_high,\
         n_precision,mean_precision,se_precision,n_recall,mean_recall,se_recall,\
         n_f1,mean_f1,se_f1,n_relevant_beta,mean_relevant_beta,se_relevant_beta"
    )?;
    for a in &report.aggregates {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            a.method.as_str(),
            a.trials,
            a.trials_scored,
            fmt_opt(a.prune_freq),
            fmt_opt(a.prune_ci_low),
            fmt_opt(a.prune_ci_high),
            a.n_precision,
            fmt_opt(a.mean_precision),
            fmt_opt(a.se_precision),
            a.n_recall,
            fmt_opt(a.mean_recall),
            fmt_opt(a.se_recall),
            a.n_f1,
            fmt_opt(a.mean_f1),
            fmt_opt(a.se_f1),
            a.n_relevant_beta,
            fmt_opt(a.mean_relevant_beta),
            fmt_opt(a.se_relevant_beta),
        )?;
    }
    w.flush()?;

    super::write_manifest(&report.spec, &dir.join("manifest.json"))
}
