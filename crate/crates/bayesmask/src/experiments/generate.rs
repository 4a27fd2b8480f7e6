//! Synthetic dataset generators.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::dataset::Dataset;

/// Two-feature design with one irrelevant feature: stacks `pairs` copies of
/// the 2x2 block [[1, 0], [0.5, 1]] (so N = 2 * pairs), true weights (0, 1),
/// Gaussian noise with variance 0.005.
pub fn gen_toy(seed: u64, pairs: usize) -> Dataset {
    gen_toy_with_noise(seed, pairs, 0.005)
}

pub fn gen_toy_with_noise(seed: u64, pairs: usize, noise_variance: f64) -> Dataset {
    assert!(pairs >= 1, "need at least one design pair");
    assert!(noise_variance >= 0.0 && noise_variance.is_finite());
    let n = 2 * pairs;
    let mut x = DMatrix::zeros(n, 2);
    for p in 0..pairs {
        x[(2 * p, 0)] = 1.0;
        x[(2 * p, 1)] = 0.0;
        x[(2 * p + 1, 0)] = 0.5;
        x[(2 * p + 1, 1)] = 1.0;
    }
    let beta = DVector::from_vec(vec![0.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = &x * &beta;
    if noise_variance > 0.0 {
        let noise = Normal::new(0.0, noise_variance.sqrt()).expect("valid noise scale");
        for v in y.iter_mut() {
            *v += noise.sample(&mut rng);
        }
    }
    Dataset::new(x, y)
        .expect("toy design is finite")
        .with_truth(beta, BTreeSet::from([0]))
        .expect("truth dimensions match")
}

/// Uniform random design: X and the true weights drawn from U[0, 1], a
/// uniformly random half of the weights zeroed, N = multiplier * K, noise
/// variance 0.2.
pub fn gen_uniform(seed: u64, k: usize, multiplier: usize) -> Dataset {
    gen_uniform_with_noise(seed, k, multiplier, 0.2)
}

pub fn gen_uniform_with_noise(seed: u64, k: usize, multiplier: usize, noise_variance: f64) -> Dataset {
    assert!(k >= 2, "need at least two features");
    assert!(multiplier >= 1);
    assert!(noise_variance >= 0.0 && noise_variance.is_finite());
    let n = multiplier * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Draw order is fixed: design row-major, then weights, then the zero
    // subset, then noise.
    let mut x = DMatrix::zeros(n, k);
    for row in 0..n {
        for col in 0..k {
            x[(row, col)] = rng.random::<f64>();
        }
    }
    let mut beta = DVector::from_fn(k, |_, _| rng.random::<f64>());
    let mut indices: Vec<usize> = (0..k).collect();
    indices.shuffle(&mut rng);
    let irrelevant: BTreeSet<usize> = indices.into_iter().take(k / 2).collect();
    for &j in &irrelevant {
        beta[j] = 0.0;
    }

    let mut y = &x * &beta;
    if noise_variance > 0.0 {
        let noise = Normal::new(0.0, noise_variance.sqrt()).expect("valid noise scale");
        for v in y.iter_mut() {
            *v += noise.sample(&mut rng);
        }
    }
    Dataset::new(x, y)
        .expect("uniform design is finite")
        .with_truth(beta, irrelevant)
        .expect("truth dimensions match")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_shape_and_truth() {
        let data = gen_toy(1, 20);
        assert_eq!(data.n(), 40);
        assert_eq!(data.k(), 2);
        assert_eq!(data.true_beta().unwrap().as_slice(), &[0.0, 1.0]);
        assert_eq!(data.true_irrelevant().unwrap().iter().copied().collect::<Vec<_>>(), vec![0]);
        for p in 0..20 {
            assert_eq!(data.x()[(2 * p, 0)], 1.0);
            assert_eq!(data.x()[(2 * p + 1, 0)], 0.5);
            assert_eq!(data.x()[(2 * p + 1, 1)], 1.0);
        }
    }

    #[test]
    fn toy_noiseless_override() {
        let data = gen_toy_with_noise(9, 3, 0.0);
        for p in 0..3 {
            assert_eq!(data.y()[2 * p], 0.0);
            assert_eq!(data.y()[2 * p + 1], 1.0);
        }
    }

    #[test]
    fn toy_deterministic() {
        assert_eq!(gen_toy(5, 10), gen_toy(5, 10));
        assert_ne!(gen_toy(5, 10), gen_toy(6, 10));
    }

    #[test]
    fn uniform_shape_and_sparsity() {
        let data = gen_uniform(3, 50, 20);
        assert_eq!(data.n(), 1000);
        assert_eq!(data.k(), 50);
        let zeros = data.true_beta().unwrap().iter().filter(|&&b| b == 0.0).count();
        assert_eq!(zeros, 25);
        assert_eq!(data.true_irrelevant().unwrap().len(), 25);
        assert!(data.x().iter().all(|&v| (0.0..1.0).contains(&v)));

        let small = gen_uniform(3, 10, 20);
        assert_eq!(small.n(), 200);
    }

    #[test]
    fn uniform_seeds_pick_different_supports() {
        let a = gen_uniform(1, 20, 5);
        let b = gen_uniform(2, 20, 5);
        assert_ne!(a.true_irrelevant(), b.true_irrelevant());
    }
}
