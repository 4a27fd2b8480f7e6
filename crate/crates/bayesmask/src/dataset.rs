//! Regression dataset container.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A fixed design matrix with targets, plus optional ground truth for
/// synthetic benchmarks.
///
/// Rows of `x` are samples, columns are features. `true_beta` and
/// `true_irrelevant` are only populated by the synthetic generators and are
/// used for selection scoring, never by the estimators themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
    true_beta: Option<DVector<f64>>,
    true_irrelevant: Option<BTreeSet<usize>>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "design matrix must be non-empty, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        if y.len() != x.nrows() {
            return Err(Error::LengthMismatch { left: y.len(), right: x.nrows() });
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("dataset contains NaN or infinite entries".into()));
        }
        Ok(Self { x, y, true_beta: None, true_irrelevant: None })
    }

    /// Attach ground truth used for scoring synthetic fits.
    pub fn with_truth(mut self, beta: DVector<f64>, irrelevant: BTreeSet<usize>) -> Result<Self> {
        if beta.len() != self.k() {
            return Err(Error::LengthMismatch { left: beta.len(), right: self.k() });
        }
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("true_beta contains NaN or infinite entries".into()));
        }
        if let Some(&ix) = irrelevant.iter().next_back() {
            if ix >= self.k() {
                return Err(Error::InvalidInput(format!(
                    "true_irrelevant index {ix} out of range for {} features",
                    self.k()
                )));
            }
        }
        self.true_beta = Some(beta);
        self.true_irrelevant = Some(irrelevant);
        Ok(self)
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of features.
    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn true_beta(&self) -> Option<&DVector<f64>> {
        self.true_beta.as_ref()
    }

    pub fn true_irrelevant(&self) -> Option<&BTreeSet<usize>> {
        self.true_irrelevant.as_ref()
    }

    /// Boolean mask over features, true where the true weight is zero.
    ///
    /// Present only when ground truth was attached.
    pub fn truth_zero_mask(&self) -> Option<Vec<bool>> {
        self.true_irrelevant
            .as_ref()
            .map(|set| (0..self.k()).map(|j| set.contains(&j)).collect())
    }

    /// Copy of the columns named by `active`, in the given order.
    pub fn gather_columns(&self, active: &[usize]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n(), active.len());
        for (slot, &j) in active.iter().enumerate() {
            out.set_column(slot, &self.x.column(j));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(Dataset::new(DMatrix::zeros(0, 1), DVector::zeros(0)).is_err());
        assert!(Dataset::new(DMatrix::zeros(3, 2), DVector::zeros(2)).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let x = DMatrix::from_row_slice(2, 1, &[1.0, f64::NAN]);
        assert!(Dataset::new(x, DVector::from_element(2, 0.0)).is_err());
        let x = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        assert!(Dataset::new(x, DVector::from_vec(vec![0.0, f64::INFINITY])).is_err());
    }

    #[test]
    fn truth_length_must_match() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let d = Dataset::new(x, DVector::from_vec(vec![1.0, 2.0])).unwrap();
        assert!(d.clone().with_truth(DVector::zeros(3), BTreeSet::new()).is_err());
        let d = d.with_truth(DVector::zeros(2), BTreeSet::from([1])).unwrap();
        assert_eq!(d.truth_zero_mask().unwrap(), vec![false, true]);
    }
}
