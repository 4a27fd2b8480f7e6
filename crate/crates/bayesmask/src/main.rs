//! Experiment CLI: thin argument parsing over the library drivers.
//!
//! Every subcommand writes CSV tables plus a JSON manifest; failures exit
//! nonzero with a one-line JSON error on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bayesmask::baselines::{ard_fit, lasso_cv, least_squares, unbiased_precision, BaselineEstimate};
use bayesmask::experiments::{
    default_initial_points, run_comparison, run_convergence_race, run_trajectories,
    write_comparison_csvs, write_manifest, write_race_csvs, write_trajectory_csvs,
    ExperimentSpec, TrajectoryOptions,
};
use bayesmask::io::{load_dataset, save_dataset, save_history_csv, GeneratorSpec};
use bayesmask::{Error, SolverConfig};

#[derive(Parser)]
#[command(name = "bayesmask", version, about = "Sparse regression by Bayesian masking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (CSV plus JSON manifest).
    Gen(GenArgs),
    /// Fit one method to a dataset file.
    Fit(FitArgs),
    /// Run the multi-trial method comparison described by a spec file.
    Compare {
        /// Experiment spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Output directory for the CSV tables.
        #[arg(long)]
        out: PathBuf,
    },
    /// Record learning trajectories of the irrelevant feature on toy data.
    Trajectory(TrajectoryArgs),
    /// Race the hybrid solver against pure closed-form updates.
    Race(RaceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DatasetKind {
    Toy,
    Uniform,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: DatasetKind,
    /// Feature count (toy datasets force 2).
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; the manifest lands next to it.
    #[arg(long)]
    out: PathBuf,
    /// Design pairs for toy data (N = 2 * pairs).
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    /// Samples per feature for uniform data (N = multiplier * K).
    #[arg(long, default_value_t = 20)]
    multiplier: usize,
    /// Override the default noise variance (0.005 toy, 0.2 uniform).
    #[arg(long)]
    noise_var: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FitMethod {
    BmEm,
    BmEg,
    BmHybrid,
    Lasso,
    Ard,
    Ls,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    method: FitMethod,
    /// Pruning threshold (masking fits).
    #[arg(long)]
    delta: Option<f64>,
    /// Base learning coefficient (gradient variants).
    #[arg(long)]
    eta: Option<f64>,
    /// Hybrid switch iteration.
    #[arg(long)]
    switch_t: Option<usize>,
    /// Cross-validation folds (lasso).
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Known noise precision; estimated from the least-squares residual when
    /// absent.
    #[arg(long)]
    lambda: Option<f64>,
    /// Output JSON path; masking fits also write `<stem>.history.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Sample count of the generated toy dataset.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 50_000)]
    budget: usize,
    #[arg(long, default_value_t = 2e-6)]
    eta_reparam: f64,
    #[arg(long, default_value_t = 2e-4)]
    eta_plain: f64,
    /// Initial points as beta:pi pairs, e.g. --point 0.5:0.5; defaults to the
    /// diagonal grid.
    #[arg(long = "point", value_parser = parse_point)]
    points: Vec<(f64, f64)>,
}

#[derive(Args)]
struct RaceArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    switch_t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (b, p) = s.split_once(':').ok_or_else(|| format!("expected beta:pi, got '{s}'"))?;
    Ok((
        b.trim().parse().map_err(|e| format!("bad beta '{b}': {e}"))?,
        p.trim().parse().map_err(|e| format!("bad pi '{p}': {e}"))?,
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string(), "kind": e.kind() }));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Fit(args) => fit_command(args),
        Command::Compare { spec, out } => {
            let text = std::fs::read_to_string(&spec)?;
            let spec: ExperimentSpec = serde_json::from_str(&text)?;
            let report = run_comparison(&spec)?;
            write_comparison_csvs(&report, &out)?;
            println!("wrote comparison tables to {}", out.display());
            Ok(())
        }
        Command::Trajectory(args) => trajectory(args),
        Command::Race(args) => {
            let report = run_convergence_race(args.seed, args.k, args.switch_t)?;
            write_race_csvs(&report, &args.out)?;
            write_manifest(
                &json!({"seed": args.seed, "k": args.k, "switch_t": args.switch_t}),
                &args.out.join("manifest.json"),
            )?;
            println!(
                "hybrid: {} correct / {} wrong; em: {} correct / {} wrong ({})",
                report.hybrid.final_correct,
                report.hybrid.final_wrong,
                report.em.final_correct,
                report.em.final_wrong,
                args.out.display()
            );
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<(), Error> {
    let (data, generator) = match args.kind {
        DatasetKind::Toy => {
            if args.k != 2 {
                return Err(Error::InvalidInput(format!(
                    "toy datasets force k = 2, got {}",
                    args.k
                )));
            }
            let noise = args.noise_var.unwrap_or(0.005);
            (
                bayesmask::experiments::gen_toy_with_noise(args.seed, args.pairs, noise),
                GeneratorSpec::Toy { pairs: args.pairs, noise_variance: noise },
            )
        }
        DatasetKind::Uniform => {
            let noise = args.noise_var.unwrap_or(0.2);
            (
                bayesmask::experiments::gen_uniform_with_noise(
                    args.seed,
                    args.k,
                    args.multiplier,
                    noise,
                ),
                GeneratorSpec::Uniform {
                    k: args.k,
                    multiplier: args.multiplier,
                    noise_variance: noise,
                },
            )
        }
    };
    save_dataset(&data, &args.out, Some(args.seed), Some(generator))?;
    println!("wrote {} samples x {} features to {}", data.n(), data.k(), args.out.display());
    Ok(())
}

fn baseline_lambda(args: &FitArgs, data: &bayesmask::Dataset) -> Result<f64, Error> {
    if let Some(l) = args.lambda {
        if !(l > 0.0) {
            return Err(Error::InvalidInput("lambda must be positive".into()));
        }
        return Ok(l);
    }
    let ls = least_squares(data)?;
    Ok(unbiased_precision(data, &ls.beta_hat))
}

fn baseline_json(est: &BaselineEstimate, method: &str) -> serde_json::Value {
    json!({
        "method": method,
        "beta_hat": est.beta_hat.iter().copied().collect::<Vec<f64>>(),
        "alpha": est.alpha,
        "gamma_hat": est.gamma_hat.as_ref().map(|g| g.iter().copied().collect::<Vec<f64>>()),
        "lambda": est.lambda,
        "zero_mask": est.zero_mask(),
    })
}

fn fit_command(args: FitArgs) -> Result<(), Error> {
    let data = load_dataset(&args.data)?;
    let method_name = match args.method {
        FitMethod::BmEm => "bm-em",
        FitMethod::BmEg => "bm-eg",
        FitMethod::BmHybrid => "bm-hybrid",
        FitMethod::Lasso => "lasso",
        FitMethod::Ard => "ard",
        FitMethod::Ls => "ls",
    };

    let output = match args.method {
        FitMethod::BmEm | FitMethod::BmEg | FitMethod::BmHybrid => {
            let mut config = match args.method {
                FitMethod::BmEm => SolverConfig::em(),
                FitMethod::BmEg => SolverConfig::eg(),
                _ => SolverConfig::hybrid(args.switch_t.unwrap_or(500)),
            };
            if let Some(d) = args.delta {
                config.delta = d;
            }
            if args.eta.is_some() {
                config.eta = args.eta;
            }
            if let Some(s) = args.seed {
                config.seed = s;
            }
            let result = match bayesmask::fit(&data, &config) {
                Ok(r) => r,
                Err(failure) => {
                    // Keep the partial trajectory around for debugging.
                    let _ = save_history_csv(
                        &failure.partial,
                        &args.out.with_extension("history.csv"),
                    );
                    return Err(failure.error);
                }
            };
            save_history_csv(&result, &args.out.with_extension("history.csv"))?;
            json!({
                "method": method_name,
                "config": config,
                "beta_hat": result.expanded_beta().iter().copied().collect::<Vec<f64>>(),
                "pi": result.expanded_pi().iter().copied().collect::<Vec<f64>>(),
                "lambda": result.state.lambda,
                "active": result.state.active,
                "pruned_at": result.pruned_at,
                "iterations": result.iterations(),
                "objective": result.final_objective(),
                "converged": result.iterations() < config.max_iterations,
                "zero_mask": result.zero_mask(),
            })
        }
        FitMethod::Lasso => {
            let lambda = baseline_lambda(&args, &data)?;
            let grid = bayesmask::baselines::default_alpha_grid(data.n());
            let est = lasso_cv(
                &data,
                lambda,
                args.folds.unwrap_or(10),
                &grid,
                args.seed.unwrap_or(0),
            )?;
            baseline_json(&est, method_name)
        }
        FitMethod::Ard => {
            let lambda = baseline_lambda(&args, &data)?;
            let est = ard_fit(&data, lambda, 1e-8)?;
            baseline_json(&est, method_name)
        }
        FitMethod::Ls => {
            let est = least_squares(&data)?;
            baseline_json(&est, method_name)
        }
    };

    std::fs::write(&args.out, serde_json::to_string_pretty(&output)?)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn trajectory(args: TrajectoryArgs) -> Result<(), Error> {
    let opts = TrajectoryOptions {
        budget: args.budget,
        eta_reparam: args.eta_reparam,
        eta_plain: args.eta_plain,
        ..TrajectoryOptions::default()
    };
    let points =
        if args.points.is_empty() { default_initial_points() } else { args.points.clone() };
    let records = run_trajectories(args.seed, args.samples, &points, &opts)?;
    write_trajectory_csvs(&records, &args.out)?;
    write_manifest(
        &json!({
            "seed": args.seed,
            "samples": args.samples,
            "points": points,
            "options": opts,
        }),
        &args.out.join("manifest.json"),
    )?;
    println!("wrote trajectory tables to {}", args.out.display());
    Ok(())
}
