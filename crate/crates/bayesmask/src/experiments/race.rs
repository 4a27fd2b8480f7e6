//! Convergence race: hybrid versus pure closed-form updates on the same
//! uniform dataset, tracking how fast each prunes the truly irrelevant
//! features.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FitResult;
use crate::solver::{fit, SolverConfig};

use super::gen_uniform;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RacePoint {
    pub iteration: usize,
    pub elapsed_seconds: f64,
    pub correctly_pruned: usize,
    pub wrongly_pruned: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RaceSeries {
    pub algorithm: String,
    pub points: Vec<RacePoint>,
    pub final_correct: usize,
    pub final_wrong: usize,
    pub failed: Option<String>,
}

impl RaceSeries {
    /// First iteration at which at least `target` features were correctly
    /// pruned.
    pub fn iterations_to_reach(&self, target: usize) -> Option<usize> {
        self.points.iter().find(|p| p.correctly_pruned >= target).map(|p| p.iteration)
    }

    /// First wall-clock time at which at least `target` features were
    /// correctly pruned.
    pub fn seconds_to_reach(&self, target: usize) -> Option<f64> {
        self.points.iter().find(|p| p.correctly_pruned >= target).map(|p| p.elapsed_seconds)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RaceReport {
    pub seed: u64,
    pub k: usize,
    pub switch_iteration: usize,
    pub em: RaceSeries,
    pub hybrid: RaceSeries,
}

fn series_from(result: &FitResult, truth: &[bool], algorithm: &str, failed: Option<String>) -> RaceSeries {
    let points: Vec<RacePoint> = result
        .history
        .iter()
        .map(|rec| {
            let mut correct = 0;
            let mut wrong = 0;
            for (&j, &at) in &result.pruned_at {
                if at <= rec.iteration {
                    if truth[j] {
                        correct += 1;
                    } else {
                        wrong += 1;
                    }
                }
            }
            RacePoint {
                iteration: rec.iteration,
                elapsed_seconds: rec.elapsed_seconds,
                correctly_pruned: correct,
                wrongly_pruned: wrong,
            }
        })
        .collect();
    let last = points.last().copied();
    RaceSeries {
        algorithm: algorithm.to_string(),
        points,
        final_correct: last.map(|p| p.correctly_pruned).unwrap_or(0),
        final_wrong: last.map(|p| p.wrongly_pruned).unwrap_or(0),
        failed,
    }
}

fn race_config(delta: f64) -> SolverConfig {
    let mut config = SolverConfig::em();
    config.delta = delta;
    config
}

fn run_one(data: &crate::Dataset, config: &SolverConfig, truth: &[bool], name: &str) -> Result<RaceSeries> {
    match fit(data, config) {
        Ok(result) => Ok(series_from(&result, truth, name, None)),
        // A fully pruned model still has a meaningful pruning series.
        Err(failure) if matches!(failure.error, Error::EmptyModel) => {
            Ok(series_from(&failure.partial, truth, name, Some(failure.error.to_string())))
        }
        Err(failure) => Err(failure.error),
    }
}

/// Fit the hybrid solver (switching at `switch_iteration`) and the pure
/// closed-form solver on one uniform dataset (N = 20 K, noise variance 0.2,
/// pruning threshold 1e-3), sequentially so the wall-clock series are
/// honest.
pub fn run_convergence_race(seed: u64, k: usize, switch_iteration: usize) -> Result<RaceReport> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("race needs k >= 2, got {k}")));
    }
    let data = gen_uniform(seed, k, 20);
    let truth = data.truth_zero_mask().expect("generator attaches truth");

    let mut em_config = race_config(1e-3);
    em_config.seed = seed;
    let mut hybrid_config = race_config(1e-3);
    hybrid_config.variant = crate::solver::SolverVariant::Hybrid;
    hybrid_config.switch_iteration = switch_iteration;
    hybrid_config.seed = seed;

    let hybrid = run_one(&data, &hybrid_config, &truth, "hybrid")?;
    let em = run_one(&data, &em_config, &truth, "em")?;

    Ok(RaceReport { seed, k, switch_iteration, em, hybrid })
}

/// Write `race_em.csv`, `race_hybrid.csv`, and `race_summary.csv` under
/// `dir`.
pub fn write_race_csvs(report: &RaceReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for series in [&report.em, &report.hybrid] {
        let path = dir.join(format!("race_{}.csv", series.algorithm));
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "iteration,elapsed_seconds,correctly_pruned,wrongly_pruned")?;
        for p in &series.points {
            writeln!(
                w,
                "{},{},{},{}",
                p.iteration, p.elapsed_seconds, p.correctly_pruned, p.wrongly_pruned
            )?;
        }
        w.flush()?;
    }
    let mut w = BufWriter::new(File::create(dir.join("race_summary.csv"))?);
    writeln!(w, "algorithm,iterations,final_correctly_pruned,final_wrongly_pruned,failed")?;
    for series in [&report.em, &report.hybrid] {
        writeln!(
            w,
            "{},{},{},{},{}",
            series.algorithm,
            series.points.last().map(|p| p.iteration).unwrap_or(0),
            series.final_correct,
            series.final_wrong,
            series.failed.as_deref().unwrap_or("")
        )?;
    }
    w.flush()?;
    Ok(())
}
