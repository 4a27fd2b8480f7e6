//! Estimator bias under fixed masks. With correlated design columns and an
//! imperfect mask on one feature, the masked estimator picks up a cross-term
//! bias; the analytic expectation matches a Monte Carlo noise average.
//!
//! ```bash
//! cargo run --release -p bayesmask --example bias_analysis
//! ```

use bayesmask::analysis::fab_bias;
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

fn main() {
    let n = 30;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    // Correlated columns: the second shares most of the first's direction.
    let mut x = DMatrix::zeros(n, 2);
    for row in 0..n {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        x[(row, 0)] = a;
        x[(row, 1)] = 0.9 * a + 0.45 * b;
    }
    let beta_star = DVector::from_vec(vec![1.0, 0.8]);

    // Perfect mask on feature 0, half-on mask on feature 1.
    let mut mu = DMatrix::from_element(n, 2, 1.0);
    mu.column_mut(1).fill(0.5);

    let out = fab_bias(&beta_star, &x, &mu).unwrap();
    println!("analytic expectation: {:?}", out.expected_beta.as_slice());
    println!("analytic bias:        {:?}", out.bias.as_slice());

    // Monte Carlo check: average the masked estimator over noise draws.
    let sigma = 0.1f64;
    let draws = 50_000;
    let xt = x.component_mul(&mu);
    let mut omega = xt.tr_mul(&xt);
    for k in 0..2 {
        let d: f64 = (0..n).map(|r| x[(r, k)] * x[(r, k)] * mu[(r, k)] * (1.0 - mu[(r, k)])).sum();
        omega[(k, k)] += d;
    }
    let solve = omega.cholesky().unwrap();
    let clean = &x * &beta_star;
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut mean = DVector::zeros(2);
    for _ in 0..draws {
        let y = &clean + DVector::from_fn(n, |_, _| noise.sample(&mut rng));
        mean += solve.solve(&xt.tr_mul(&y));
    }
    mean /= draws as f64;
    println!("monte carlo mean:     {:?} ({draws} draws)", mean.as_slice());
    println!("\nall-on masks would give expectation = true beta: bias needs both");
    println!("correlated columns and masks strictly between 0 and 1.");
}
