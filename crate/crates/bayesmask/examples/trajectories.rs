//! Learning trajectories of the irrelevant feature's (beta, pi) under three
//! update rules. Closed-form updates stall near the weight-zero singularity;
//! plain gradient ascent escapes slowly; the reparametrized gradient prunes
//! quickly from every starting point.
//!
//! ```bash
//! cargo run --release -p bayesmask --example trajectories -- [budget]
//! ```

use bayesmask::experiments::{run_trajectories, TrajectoryAlgorithm, TrajectoryOptions};

fn main() {
    let budget: usize =
        std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let points = [(0.2, 0.23), (0.5, 0.50), (1.0, 0.95)];
    let opts = TrajectoryOptions { budget, ..TrajectoryOptions::default() };
    let records = run_trajectories(13, 100, &points, &opts).expect("trajectories run");

    println!("100 samples, budget {budget} iterations, eta = 2e-6 (reparam) / 2e-4 (plain)\n");
    println!("{:>14} {:>14} {:>18} {:>22}", "start (b1,p1)", "algorithm", "pruned at", "last (b1,p1)");
    for rec in &records {
        let tag = match rec.algorithm {
            TrajectoryAlgorithm::Em => "em",
            TrajectoryAlgorithm::Eg => "eg (reparam)",
            TrajectoryAlgorithm::EgNoReparam => "eg (plain)",
        };
        let (b, p) = rec.path.last().copied().unwrap();
        println!(
            "{:>6.2},{:>6.2} {:>15} {:>18} {:>11.4},{:>9.4}",
            rec.initial_beta1,
            rec.initial_pi1,
            tag,
            rec.pruned_at_iteration.map(|i| i.to_string()).unwrap_or_else(|| "never".into()),
            b,
            p
        );
    }
}
