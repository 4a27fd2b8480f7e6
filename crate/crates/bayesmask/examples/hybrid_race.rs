//! Convergence race: hybrid (closed forms, then gradient steps) against pure
//! closed-form updates on one uniform dataset, tracked by how many truly
//! irrelevant features each has pruned.
//!
//! ```bash
//! cargo run --release -p bayesmask --example hybrid_race -- [k] [switch_t]
//! ```

use bayesmask::experiments::run_convergence_race;

fn main() {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(30);
    let switch_t: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(150);

    let report = run_convergence_race(3, k, switch_t).expect("race runs");
    let irrelevant = k / 2;

    println!("k = {k}, N = {}, switch at {switch_t}; {irrelevant} truly irrelevant features\n", 20 * k);
    println!("{:>22} {:>12} {:>12}", "correctly pruned", "hybrid (it)", "em (it)");
    for target in [irrelevant / 4, irrelevant / 2, 3 * irrelevant / 4, irrelevant] {
        if target == 0 {
            continue;
        }
        let fmt = |v: Option<usize>| v.map(|i| i.to_string()).unwrap_or_else(|| "never".into());
        println!(
            "{target:>22} {:>12} {:>12}",
            fmt(report.hybrid.iterations_to_reach(target)),
            fmt(report.em.iterations_to_reach(target))
        );
    }
    println!(
        "\nfinal wrongly pruned: hybrid {}, em {}",
        report.hybrid.final_wrong, report.em.final_wrong
    );
    println!(
        "total iterations: hybrid {}, em {}",
        report.hybrid.points.last().map(|p| p.iteration).unwrap_or(0),
        report.em.points.last().map(|p| p.iteration).unwrap_or(0)
    );
}
