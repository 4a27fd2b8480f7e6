//! Minimal end-to-end fit: generate the two-feature dataset, run the
//! closed-form solver with zero-tolerance pruning, and inspect the result.
//!
//! ```bash
//! cargo run --release -p bayesmask --example fit_toy
//! ```

use bayesmask::experiments::gen_toy;
use bayesmask::{fit, SolverConfig};

fn main() {
    let data = gen_toy(7, 20);
    println!(
        "toy dataset: {} samples, {} features, true beta = {:?}",
        data.n(),
        data.k(),
        data.true_beta().unwrap().as_slice()
    );

    let config = SolverConfig::em();
    let result = fit(&data, &config).expect("toy fit converges");

    println!("\niterations: {}", result.iterations());
    println!("final objective: {:.6}", result.final_objective());
    println!("beta_hat: {:?}", result.expanded_beta().as_slice());
    println!("pi_hat:   {:?}", result.expanded_pi().as_slice());
    println!("noise precision: {:.3} (true 200)", result.state.lambda);
    for (feature, iteration) in &result.pruned_at {
        println!("feature {feature} pruned at iteration {iteration}");
    }

    println!("\nobjective trace (first 5, last 3):");
    for rec in result.history.iter().take(5) {
        println!("  it {:4}  G = {:+.6}  active = {}", rec.iteration, rec.objective, rec.active_count);
    }
    println!("  ...");
    let len = result.history.len();
    for rec in result.history.iter().skip(len.saturating_sub(3)) {
        println!("  it {:4}  G = {:+.6}  active = {}", rec.iteration, rec.objective, rec.active_count);
    }
}
