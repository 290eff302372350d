//! `odoem benchmark`: learning curves for several strategies on one dataset.
//!
//! Each (strategy, seed) pair is an independent run; `--jobs` spreads the
//! pairs over worker threads without changing any result. Outputs per run,
//! per-strategy mean curves, and a comparison table land in `--out-dir`.

use crate::config::{parse_names, parse_seeds, ConfigFile};
use crate::emit::{csv_row, write_with_header, Header};
use crate::error::CliError;
use crate::input::load_input;
use clap::Args as ClapArgs;
use odoem::baselines::StrategySpec;
use odoem::harness::{
    run_experiment, ExperimentConfig, HarnessError, LambdaSchedule, LearningCurve, PreparedDataset,
};
use odoem::kernels::KernelSpec;
use std::path::PathBuf;

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Config file with `key = value` lines; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dataset CSV (manifold or image format)
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Comma-separated strategy names (odoem, classical-d, random,
    /// l2-discrepancy, minimax, maximin)
    #[arg(long)]
    strategies: Option<String>,
    /// Seeds: a number, a comma list, or an inclusive range like 1..10
    #[arg(long)]
    seeds: Option<String>,
    /// Labels revealed per run
    #[arg(long)]
    budget: Option<usize>,
    /// Kernel family: rbf or linear
    #[arg(long)]
    kernel: Option<String>,
    /// RBF range parameter
    #[arg(long)]
    range: Option<f64>,
    /// Ridge weight
    #[arg(long)]
    lambda_a: Option<f64>,
    /// Fixed smoothness weight; omit for the -ln(k/n) schedule
    #[arg(long)]
    lambda_i: Option<f64>,
    /// Neighbors per point in the similarity graph
    #[arg(long)]
    knn_k: Option<usize>,
    /// Directory for curve and comparison CSVs
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads across (strategy, seed) pairs
    #[arg(long)]
    jobs: Option<usize>,
}

struct Resolved {
    input: PathBuf,
    strategies: Vec<String>,
    seeds: Vec<u64>,
    budget: usize,
    kernel: KernelSpec,
    kernel_name: String,
    range: f64,
    lambda_a: f64,
    lambda_i: Option<f64>,
    knn_k: usize,
    out_dir: PathBuf,
    jobs: usize,
}

fn resolve(args: Args) -> Result<Resolved, CliError> {
    let mut config = ConfigFile::load(args.config.as_deref())?;
    let input = config.take(args.input, "input")?;
    let strategies = config.take(args.strategies, "strategies")?;
    let seeds = config
        .take(args.seeds, "seeds")?
        .unwrap_or_else(|| "1".to_string());
    let budget = config.take(args.budget, "budget")?;
    let kernel_name = config
        .take(args.kernel, "kernel")?
        .unwrap_or_else(|| "rbf".to_string());
    let range = config.take(args.range, "range")?;
    let lambda_a = config.take(args.lambda_a, "lambda-a")?.unwrap_or(0.01);
    let lambda_i = config.take(args.lambda_i, "lambda-i")?;
    let knn_k = config.take(args.knn_k, "knn-k")?.unwrap_or(7);
    let out_dir = config.take(args.out_dir, "out-dir")?;
    let jobs = config.take(args.jobs, "jobs")?.unwrap_or(1);
    config.finish()?;
    let input = input.ok_or_else(|| CliError::usage("--input is required"))?;
    let strategies = strategies.ok_or_else(|| CliError::usage("--strategies is required"))?;
    let budget = budget.ok_or_else(|| CliError::usage("--budget is required"))?;
    let out_dir = out_dir.ok_or_else(|| CliError::usage("--out-dir is required"))?;

    let strategies = parse_names(&strategies)?;
    for (i, name) in strategies.iter().enumerate() {
        StrategySpec::from_name(name, 0)?;
        if strategies[..i].contains(name) {
            return Err(CliError::usage(format!("strategy {name:?} listed twice")));
        }
    }
    let seeds = parse_seeds(&seeds)?;
    if jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    let kernel = match kernel_name.as_str() {
        "rbf" => {
            let range = range.unwrap_or(0.01);
            if !(range > 0.0) {
                return Err(CliError::usage(format!(
                    "--range must be positive, got {range}"
                )));
            }
            KernelSpec::rbf(range)?
        }
        "linear" => {
            if range.is_some() {
                return Err(CliError::usage("--range applies only to the rbf kernel"));
            }
            KernelSpec::linear()
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown kernel {other:?}; valid kernels: rbf, linear"
            )))
        }
    };
    Ok(Resolved {
        input,
        strategies,
        seeds,
        budget,
        kernel,
        kernel_name,
        range: range.unwrap_or(0.01),
        lambda_a,
        lambda_i,
        knn_k,
        out_dir,
        jobs,
    })
}

fn schedule_of(resolved: &Resolved) -> LambdaSchedule {
    match resolved.lambda_i {
        Some(value) => LambdaSchedule::Constant(value),
        None => LambdaSchedule::NegLogFraction,
    }
}

fn schedule_label(resolved: &Resolved) -> String {
    match resolved.lambda_i {
        Some(value) => value.to_string(),
        None => "neg-log-fraction".to_string(),
    }
}

/// Shared header fields, without the per-run strategy and seed.
fn base_header(resolved: &Resolved) -> Header {
    let mut header = Header::new("benchmark");
    header.push("input", resolved.input.display());
    header.push("kernel", &resolved.kernel_name);
    if resolved.kernel_name == "rbf" {
        header.push("range", resolved.range);
    }
    header.push("lambda-a", resolved.lambda_a);
    header.push("lambda-i", schedule_label(resolved));
    header.push("knn-k", resolved.knn_k);
    header.push("budget", resolved.budget);
    header.push("out-dir", resolved.out_dir.display());
    header
}

fn curve_body(curve: &LearningCurve) -> String {
    let mut body = String::from("k,index,lambda_i,mse,logdet,gap\n");
    for r in &curve.records {
        body.push_str(&csv_row(&[
            r.k.to_string(),
            r.index.to_string(),
            r.lambda_i.to_string(),
            r.mse.to_string(),
            r.logdet.to_string(),
            r.gap.to_string(),
        ]));
    }
    body
}

/// Column means over curves of equal length, per record field.
fn mean_body(curves: &[&LearningCurve], budget: usize) -> String {
    let mut body = String::from("k,mse,logdet,gap\n");
    for step in 0..budget {
        let m = curves.len() as f64;
        let mse: f64 = curves.iter().map(|c| c.records[step].mse).sum::<f64>() / m;
        let logdet: f64 = curves.iter().map(|c| c.records[step].logdet).sum::<f64>() / m;
        let gap: f64 = curves.iter().map(|c| c.records[step].gap).sum::<f64>() / m;
        body.push_str(&csv_row(&[
            (step + 1).to_string(),
            mse.to_string(),
            logdet.to_string(),
            gap.to_string(),
        ]));
    }
    body
}

/// Runs every (strategy, seed) pair, `jobs` pairs at a time. Results come
/// back in pair order regardless of scheduling.
fn run_pairs(
    configs: &[ExperimentConfig],
    data: &PreparedDataset,
    jobs: usize,
) -> Result<Vec<LearningCurve>, CliError> {
    let jobs = jobs.min(configs.len()).max(1);
    let chunk_size = configs.len().div_ceil(jobs);
    let mut slots: Vec<Option<Result<LearningCurve, HarnessError>>> =
        (0..configs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (worker, chunk) in configs.chunks(chunk_size).enumerate() {
            let offset = worker * chunk_size;
            handles.push(scope.spawn(move || {
                chunk
                    .iter()
                    .enumerate()
                    .map(|(i, config)| (offset + i, run_experiment(config, data)))
                    .collect::<Vec<_>>()
            }));
        }
        for handle in handles {
            for (index, result) in handle.join().expect("benchmark worker panicked") {
                slots[index] = Some(result);
            }
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("every pair ran").map_err(CliError::from))
        .collect()
}

pub fn run(args: Args) -> Result<i32, CliError> {
    let resolved = resolve(args)?;
    let input_data = load_input(&resolved.input)?;
    let pool_size = input_data.len();
    let (points, labels) = input_data.into_parts();
    let data = PreparedDataset::new(points, labels, resolved.kernel.clone(), resolved.knn_k)?;
    std::fs::create_dir_all(&resolved.out_dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", resolved.out_dir.display())))?;

    let mut configs = Vec::with_capacity(resolved.strategies.len() * resolved.seeds.len());
    for name in &resolved.strategies {
        for &seed in &resolved.seeds {
            configs.push(ExperimentConfig {
                strategy: StrategySpec::from_name(name, seed)?,
                kernel: resolved.kernel.clone(),
                lambda_a: resolved.lambda_a,
                schedule: schedule_of(&resolved),
                budget: resolved.budget,
                knn_k: resolved.knn_k,
                seed,
            });
        }
    }
    let curves = run_pairs(&configs, &data, resolved.jobs)?;

    let seeds_label = resolved
        .seeds
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let mut files = 0;
    for (name_index, name) in resolved.strategies.iter().enumerate() {
        for (seed_index, &seed) in resolved.seeds.iter().enumerate() {
            let curve = &curves[name_index * resolved.seeds.len() + seed_index];
            let mut header = base_header(&resolved);
            header.push("strategy", name);
            header.push("seed", seed);
            let path = resolved.out_dir.join(format!("{name}-{seed}.csv"));
            write_with_header(&path, &header, &curve_body(curve))?;
            files += 1;
        }
    }

    let per_strategy: Vec<Vec<&LearningCurve>> = (0..resolved.strategies.len())
        .map(|s| {
            (0..resolved.seeds.len())
                .map(|j| &curves[s * resolved.seeds.len() + j])
                .collect()
        })
        .collect();
    for (name, group) in resolved.strategies.iter().zip(&per_strategy) {
        let mut header = base_header(&resolved);
        header.push("strategy", name);
        header.push("seeds", &seeds_label);
        let path = resolved.out_dir.join(format!("{name}-mean.csv"));
        write_with_header(&path, &header, &mean_body(group, resolved.budget))?;
        files += 1;
    }

    let mut comparison = base_header(&resolved);
    comparison.push("strategies", resolved.strategies.join(","));
    comparison.push("seeds", &seeds_label);
    let mut summaries = Vec::with_capacity(resolved.strategies.len());
    for (name, group) in resolved.strategies.iter().zip(&per_strategy) {
        let m = group.len() as f64;
        let auc = group.iter().map(|c| c.auc()).sum::<f64>() / m;
        let final_mse = group
            .iter()
            .map(|c| c.final_mse().expect("budget is positive"))
            .sum::<f64>()
            / m;
        comparison.push(
            "summary",
            format!("{name}: auc = {auc}, final_mse = {final_mse}"),
        );
        summaries.push((name, auc, final_mse));
    }
    let mut body = format!("k,{}\n", resolved.strategies.join(","));
    for step in 0..resolved.budget {
        let mut fields = vec![(step + 1).to_string()];
        for group in &per_strategy {
            let m = group.len() as f64;
            fields.push((group.iter().map(|c| c.records[step].mse).sum::<f64>() / m).to_string());
        }
        body.push_str(&csv_row(&fields));
    }
    write_with_header(&resolved.out_dir.join("comparison.csv"), &comparison, &body)?;
    files += 1;

    base_header(&resolved).print();
    println!("n = {pool_size}");
    for (name, auc, final_mse) in summaries {
        println!("{name}: auc = {auc}, final_mse = {final_mse}");
    }
    println!("wrote {files} files to {}", resolved.out_dir.display());
    Ok(0)
}
