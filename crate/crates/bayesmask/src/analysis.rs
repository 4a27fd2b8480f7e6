//! Estimator bias under fixed masks, the single-feature masked estimator,
//! and selection-quality scoring.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expectation of the masked estimator over the noise, with the bias split
/// out: `expected_beta = beta_star + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct FabBias {
    pub expected_beta: DVector<f64>,
    pub bias: DVector<f64>,
}

/// Noise-averaged masked estimator for true weights `beta_star` under fixed
/// posterior masks `mu`.
///
/// With `Xt = X .* Mu` and `Omega` the expected Gram matrix, the expectation
/// is `Omega^{-1} Xt' X beta_star`, which equals `beta_star + Omega^{-1} b`
/// where `b_k = (x_k .* mu_k)' sum_{l != k} beta_star_l (x_l .* (1 - mu_l))`.
/// The bias is driven by cross terms between correlated design columns and
/// imperfect masks; it vanishes when every off-feature mask column is all
/// ones or the masked column is all zeros.
pub fn fab_bias(beta_star: &DVector<f64>, x: &DMatrix<f64>, mu: &DMatrix<f64>) -> Result<FabBias> {
    let n = x.nrows();
    let k = x.ncols();
    if mu.nrows() != n || mu.ncols() != k {
        return Err(Error::InvalidInput(format!(
            "mu must be {n}x{k}, got {}x{}",
            mu.nrows(),
            mu.ncols()
        )));
    }
    if beta_star.len() != k {
        return Err(Error::LengthMismatch { left: beta_star.len(), right: k });
    }
    if mu.iter().any(|&m| !(0.0..=1.0).contains(&m)) {
        return Err(Error::Domain("every mu entry must lie in [0, 1]".into()));
    }

    let xt = x.component_mul(mu);
    let mut omega = xt.tr_mul(&xt);
    for kk in 0..k {
        let mut d = 0.0;
        for nn in 0..n {
            let m = mu[(nn, kk)];
            d += x[(nn, kk)] * x[(nn, kk)] * m * (1.0 - m);
        }
        omega[(kk, kk)] += d;
    }
    let chol = omega
        .cholesky()
        .ok_or_else(|| Error::Singular("expected Gram matrix is not positive definite".into()))?;

    let expected_beta = chol.solve(&(xt.tr_mul(&(x * beta_star))));

    let mut b = DVector::zeros(k);
    for kk in 0..k {
        let mut acc = 0.0;
        for ll in 0..k {
            if ll == kk {
                continue;
            }
            let mut dot = 0.0;
            for nn in 0..n {
                dot += x[(nn, kk)] * mu[(nn, kk)] * x[(nn, ll)] * (1.0 - mu[(nn, ll)]);
            }
            acc += beta_star[ll] * dot;
        }
        b[kk] = acc;
    }
    let bias = chol.solve(&b);

    Ok(FabBias { expected_beta, bias })
}

/// Single-feature masked estimator `(x .* mu)'y / (x .* mu)'x`.
///
/// With a single feature no cross terms exist, so this is unbiased for any
/// masks with positive mean; all-ones masks recover least squares.
pub fn fab_1d_estimator(x: &DVector<f64>, y: &DVector<f64>, mu: &DVector<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() != mu.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: mu.len() });
    }
    if mu.iter().any(|&m| !(0.0..=1.0).contains(&m)) {
        return Err(Error::Domain("every mu entry must lie in [0, 1]".into()));
    }
    let xt = x.component_mul(mu);
    let denom = xt.dot(x);
    if denom == 0.0 {
        return Err(Error::Domain("fully masked feature: (x .* mu)'x = 0".into()));
    }
    Ok(xt.dot(y) / denom)
}

/// Counts and derived metrics for irrelevant-feature identification.
///
/// `m1` true irrelevant, `m2` estimated irrelevant, `m3` correctly pruned.
/// Metrics with a zero denominator are absent, never 0 or NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionScore {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Score a selection decision against ground truth. Both masks are true
/// where the feature is declared (estimate) or known (truth) irrelevant.
pub fn score_selection(
    estimate_zero_mask: &[bool],
    truth_zero_mask: &[bool],
) -> Result<SelectionScore> {
    if estimate_zero_mask.len() != truth_zero_mask.len() {
        return Err(Error::LengthMismatch {
            left: estimate_zero_mask.len(),
            right: truth_zero_mask.len(),
        });
    }
    let mut m1 = 0;
    let mut m2 = 0;
    let mut m3 = 0;
    for (&est, &truth) in estimate_zero_mask.iter().zip(truth_zero_mask) {
        m1 += usize::from(truth);
        m2 += usize::from(est);
        m3 += usize::from(est && truth);
    }
    let precision = (m2 > 0).then(|| m3 as f64 / m2 as f64);
    let recall = (m1 > 0).then(|| m3 as f64 / m1 as f64);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(SelectionScore { m1, m2, m3, precision, recall, f1 })
}

/// Convenience for scoring against a set of irrelevant feature indices.
pub fn truth_mask_from_set(k: usize, irrelevant: &BTreeSet<usize>) -> Vec<bool> {
    (0..k).map(|j| irrelevant.contains(&j)).collect()
}
