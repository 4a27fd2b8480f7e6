//! Shared helpers for the integration suites.

use bayesmask::{BmState, Dataset};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Golden-section search for a convex minimum, sharpened by a bisection on
/// the sign of the centered finite-difference slope. Pure function
/// evaluations; convexity lets a kink minimum at zero be certified directly.
pub fn numeric_convex_argmin(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let h = 1e-6;
    if lo < 0.0 && hi > 0.0 {
        let f0 = f(0.0);
        if f0 <= f(h) && f0 <= f(-h) {
            return 0.0;
        }
    }
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-4 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let coarse = 0.5 * (a + b);
    let slope = |x: f64| f(x + h) - f(x - h);
    let (mut a, mut b) = ((coarse - 2e-4).max(lo), (coarse + 2e-4).min(hi));
    if slope(a) >= 0.0 {
        return a;
    }
    if slope(b) <= 0.0 {
        return b;
    }
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if slope(mid) > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Random interior state/data pair for gradient and step checks.
pub fn random_state_and_data(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (BmState, Dataset) {
    let x = DMatrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
    let y = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    let data = Dataset::new(x, y).unwrap();
    let state = BmState::new(
        DVector::from_fn(k, |_, _| rng.random_range(-2.0..2.0)),
        rng.random_range(0.5..2.0),
        DVector::from_fn(k, |_, _| rng.random_range(0.1..0.9)),
        DMatrix::from_fn(n, k, |_, _| rng.random_range(0.1..0.9)),
        (0..k).collect(),
    )
    .unwrap();
    (state, data)
}

/// Prints one pass/fail line per acceptance criterion and fails the test on
/// a violated contract.
pub fn report(criterion: &str, pass: bool, detail: &str) {
    println!("{} criterion {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed: {detail}");
}
