//! Property-based invariants.

mod common;

use std::collections::BTreeSet;

use bayesmask::analysis::score_selection;
use bayesmask::baselines::{ard_1d, lasso_1d};
use bayesmask::io::{load_dataset, save_dataset_csv};
use bayesmask::model::bernoulli_second_moment;
use bayesmask::solver::learning_coefficient;
use bayesmask::{fic_lower_bound, BmState, Dataset};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn unit_interval() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

proptest! {
    #[test]
    fn second_moment_structure(mu in prop::collection::vec(unit_interval(), 1..6)) {
        let mu = DVector::from_vec(mu);
        let m = bernoulli_second_moment(&mu);
        let outer = &mu * mu.transpose();
        for a in 0..mu.len() {
            for b in 0..mu.len() {
                prop_assert!((0.0..=1.0).contains(&m[(a, b)]));
                prop_assert!((m[(a, b)] - m[(b, a)]).abs() == 0.0);
                if a == b {
                    // Diagonal of the correction is the Bernoulli variance.
                    let var = m[(a, a)] - outer[(a, a)];
                    prop_assert!((var - mu[a] * (1.0 - mu[a])).abs() < 1e-15);
                    prop_assert!(var >= 0.0);
                } else {
                    prop_assert!((m[(a, b)] - outer[(a, b)]).abs() == 0.0);
                }
            }
        }
    }

    #[test]
    fn objective_invariant_under_column_permutation(seed in 0u64..500) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (state, data) = common::random_state_and_data(&mut rng, 6, 4);
        let base = fic_lower_bound(&state, &data).unwrap();

        let mut perm: Vec<usize> = (0..4).collect();
        perm.shuffle(&mut rng);
        let xp = {
            let mut m = DMatrix::zeros(6, 4);
            for (dst, &src) in perm.iter().enumerate() {
                m.set_column(dst, &data.x().column(src));
            }
            m
        };
        let permuted_state = BmState::new(
            DVector::from_fn(4, |i, _| state.beta[perm[i]]),
            state.lambda,
            DVector::from_fn(4, |i, _| state.pi[perm[i]]),
            DMatrix::from_fn(6, 4, |r, c| state.mu[(r, perm[c])]),
            (0..4).collect(),
        )
        .unwrap();
        let datap = Dataset::new(xp, data.y().clone()).unwrap();
        let permuted = fic_lower_bound(&permuted_state, &datap).unwrap();
        prop_assert!((base - permuted).abs() <= 1e-11 * (1.0 + base.abs()));
    }

    #[test]
    fn one_dim_soft_threshold_structure(
        xs in prop::collection::vec(-2.0..2.0f64, 3..10),
        ys in prop::collection::vec(-2.0..2.0f64, 3..10),
        lambda in 0.2..4.0f64,
        alpha in 0.0..2.0f64,
    ) {
        let n = xs.len().min(ys.len());
        let x = DVector::from_vec(xs[..n].to_vec());
        let y = DVector::from_vec(ys[..n].to_vec());
        prop_assume!(x.norm_squared() > 1e-3);
        let beta_ls = x.dot(&y) / x.norm_squared();

        // Both penalized estimators shrink toward zero and never flip sign.
        let lasso = lasso_1d(&x, &y, lambda, alpha);
        let (ard, gamma) = ard_1d(&x, &y, lambda);
        for est in [lasso, ard] {
            prop_assert!(est.abs() <= beta_ls.abs() + 1e-12);
            prop_assert!(est == 0.0 || est.signum() == beta_ls.signum());
        }
        // The estimate is exactly zero on a neighbourhood of the origin.
        if alpha > 0.0 && beta_ls.abs() < 0.5 * alpha / (lambda * x.norm_squared()) {
            prop_assert!(lasso == 0.0);
        }
        prop_assert!((gamma == 0.0) == (ard == 0.0));
    }

    #[test]
    fn selection_score_is_permutation_symmetric(
        pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..20),
        seed in 0u64..100,
    ) {
        use rand::prelude::*;
        let est: Vec<bool> = pairs.iter().map(|p| p.0).collect();
        let truth: Vec<bool> = pairs.iter().map(|p| p.1).collect();
        let base = score_selection(&est, &truth).unwrap();

        let mut perm: Vec<usize> = (0..pairs.len()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let est_p: Vec<bool> = perm.iter().map(|&i| est[i]).collect();
        let truth_p: Vec<bool> = perm.iter().map(|&i| truth[i]).collect();
        let permuted = score_selection(&est_p, &truth_p).unwrap();
        prop_assert_eq!(base, permuted);
    }

    #[test]
    fn learning_coefficient_caps_realized_step(
        deltas in prop::collection::vec(-10.0..10.0f64, 1..8),
        eta in 1e-6..1.0f64,
        cap in 1e-3..0.5f64,
    ) {
        let proposal = DVector::from_vec(deltas.clone());
        let eta_t = learning_coefficient(&proposal, eta, cap);
        prop_assert!(eta_t > 0.0 && eta_t <= eta);
        let realized = deltas.iter().fold(0.0f64, |a, d| a.max((d * eta_t / eta).abs()));
        prop_assert!(realized <= cap * (1.0 + 1e-12));
    }

    #[test]
    fn dataset_csv_round_trip_is_bit_exact(
        values in prop::collection::vec(
            prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
            4..40,
        ),
    ) {
        let n = values.len() / 2;
        prop_assume!(n >= 2);
        let y = DVector::from_vec(values[..n].to_vec());
        let x = DMatrix::from_column_slice(n, 1, &values[n..2 * n]);
        let data = Dataset::new(x, y).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("roundtrip.csv");
        save_dataset_csv(&data, &path).unwrap();
        let loaded = load_dataset(&path).unwrap();
        for i in 0..n {
            prop_assert_eq!(loaded.y()[i].to_bits(), data.y()[i].to_bits());
            prop_assert_eq!(loaded.x()[(i, 0)].to_bits(), data.x()[(i, 0)].to_bits());
        }
    }
}

#[test]
fn truth_round_trips_through_manifest() {
    let data = bayesmask::experiments::gen_uniform(3, 6, 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("with_truth.csv");
    bayesmask::io::save_dataset(&data, &path, Some(3), None).unwrap();
    let loaded = load_dataset(&path).unwrap();
    assert_eq!(loaded.true_beta(), data.true_beta());
    assert_eq!(
        loaded.true_irrelevant().cloned().unwrap_or_default(),
        data.true_irrelevant().cloned().unwrap_or(BTreeSet::new())
    );
}
