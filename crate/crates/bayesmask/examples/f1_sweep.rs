//! Selection quality versus feature count: precision, recall, and F1 for
//! masking, Lasso, and ARD on uniform designs with half the weights zero.
//!
//! ```bash
//! cargo run --release -p bayesmask --example f1_sweep -- [trials]
//! ```

use bayesmask::experiments::{run_comparison, ExperimentSpec, MethodTag};

fn main() {
    let trials: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    println!("{trials} datasets per K, N = 20K, noise variance 0.2\n");
    println!(
        "{:>4} {:>7} {:>11} {:>11} {:>11}",
        "K", "method", "precision", "recall", "f1"
    );
    for k in [10, 30] {
        let spec = ExperimentSpec::uniform(k, trials, 4242);
        let report = run_comparison(&spec).expect("comparison runs");
        for method in [MethodTag::Bm, MethodTag::Lasso, MethodTag::Ard] {
            let a = report.aggregate_for(method);
            println!(
                "{k:>4} {:>7} {:>11.3} {:>11.3} {:>11.3}",
                method.as_str(),
                a.mean_precision.unwrap_or(f64::NAN),
                a.mean_recall.unwrap_or(f64::NAN),
                a.mean_f1.unwrap_or(f64::NAN),
            );
        }
    }
}
