//! `odoem design`: solve a design problem on a dataset file.
//!
//! Continuous mode runs the weight-update solver and reports its optimality
//! certificate; discrete mode greedily picks a fixed budget of points. Both
//! print `p`, `logdet`, `gap`, and `iterations` on stdout and optionally
//! write the design records as CSV.

use crate::config::ConfigFile;
use crate::emit::{csv_row, write_with_header, Header};
use crate::error::{CliError, EXIT_NUMERICAL};
use crate::input::load_input;
use clap::Args as ClapArgs;
use odoem::design::{
    equivalence_gap_of, information_matrix, odoem_continuous, odoem_discrete, ContinuousDesign,
    FeatureMap, Regularizer, SolveOptions, StepRule,
};
use odoem::graph::EdgeWeight;
use odoem::kernels::KernelSpec;
use odoem::pool::CandidatePool;
use std::path::PathBuf;

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Config file with `key = value` lines; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dataset CSV (manifold or image format)
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Solver mode: continuous or discrete
    #[arg(long)]
    mode: Option<String>,
    /// Kernel family: rbf or linear
    #[arg(long)]
    kernel: Option<String>,
    /// RBF range parameter
    #[arg(long)]
    range: Option<f64>,
    /// Neighbors per point in the similarity graph
    #[arg(long)]
    knn_k: Option<usize>,
    /// Ridge weight
    #[arg(long)]
    lambda_a: Option<f64>,
    /// Smoothness weight; 0 drops the graph term
    #[arg(long)]
    lambda_i: Option<f64>,
    /// Certificate tolerance (continuous mode)
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap (continuous mode)
    #[arg(long)]
    max_iter: Option<usize>,
    /// Step rule: monotone-bound or line-search
    #[arg(long)]
    step_rule: Option<String>,
    /// Number of points to select (discrete mode)
    #[arg(long)]
    budget: Option<usize>,
    /// Output CSV for the design records
    #[arg(short, long)]
    output: Option<PathBuf>,
}

struct Resolved {
    input: PathBuf,
    mode: String,
    kernel: KernelSpec,
    kernel_name: String,
    range: f64,
    knn_k: usize,
    lambda_a: f64,
    lambda_i: f64,
    tol: f64,
    max_iter: usize,
    step_rule: StepRule,
    step_rule_name: String,
    budget: Option<usize>,
    output: Option<PathBuf>,
}

fn resolve(args: Args) -> Result<Resolved, CliError> {
    let mut config = ConfigFile::load(args.config.as_deref())?;
    let input = config.take(args.input, "input")?;
    let mode = config
        .take(args.mode, "mode")?
        .unwrap_or_else(|| "continuous".to_string());
    let kernel_name = config
        .take(args.kernel, "kernel")?
        .unwrap_or_else(|| "rbf".to_string());
    let range = config.take(args.range, "range")?;
    let knn_k = config.take(args.knn_k, "knn-k")?.unwrap_or(7);
    let lambda_a = config.take(args.lambda_a, "lambda-a")?.unwrap_or(0.01);
    let lambda_i = config.take(args.lambda_i, "lambda-i")?.unwrap_or(1.0);
    let tol = config.take(args.tol, "tol")?;
    let max_iter = config.take(args.max_iter, "max-iter")?;
    let step_rule_name = config.take(args.step_rule, "step-rule")?;
    let budget = config.take(args.budget, "budget")?;
    let output = config.take(args.output, "output")?;
    config.finish()?;
    let input = input.ok_or_else(|| CliError::usage("--input is required"))?;

    let kernel = match kernel_name.as_str() {
        "rbf" => {
            let range = range.unwrap_or(1.0);
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
    match mode.as_str() {
        "continuous" => {
            if budget.is_some() {
                return Err(CliError::usage("--budget applies only to discrete mode"));
            }
        }
        "discrete" => {
            if budget.is_none() {
                return Err(CliError::usage("discrete mode requires --budget"));
            }
            if tol.is_some() || max_iter.is_some() || step_rule_name.is_some() {
                return Err(CliError::usage(
                    "--tol, --max-iter, and --step-rule apply only to continuous mode",
                ));
            }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown mode {other:?}; valid modes: continuous, discrete"
            )))
        }
    }
    let step_rule_name = step_rule_name.unwrap_or_else(|| "monotone-bound".to_string());
    let step_rule = match step_rule_name.as_str() {
        "monotone-bound" => StepRule::MonotoneBound,
        "line-search" => StepRule::LineSearch,
        other => {
            return Err(CliError::usage(format!(
                "unknown step rule {other:?}; valid rules: monotone-bound, line-search"
            )))
        }
    };
    Ok(Resolved {
        input,
        mode,
        kernel,
        kernel_name,
        range: range.unwrap_or(1.0),
        knn_k,
        lambda_a,
        lambda_i,
        tol: tol.unwrap_or(1e-6),
        max_iter: max_iter.unwrap_or(5000),
        step_rule,
        step_rule_name,
        budget,
        output,
    })
}

fn header_of(resolved: &Resolved) -> Header {
    let mut header = Header::new("design");
    header.push("input", resolved.input.display());
    header.push("mode", &resolved.mode);
    header.push("kernel", &resolved.kernel_name);
    if resolved.kernel_name == "rbf" {
        header.push("range", resolved.range);
    }
    header.push("knn-k", resolved.knn_k);
    header.push("lambda-a", resolved.lambda_a);
    header.push("lambda-i", resolved.lambda_i);
    match resolved.mode.as_str() {
        "discrete" => header.push("budget", resolved.budget.unwrap_or(0)),
        _ => {
            header.push("tol", resolved.tol);
            header.push("max-iter", resolved.max_iter);
            header.push("step-rule", &resolved.step_rule_name);
        }
    }
    if let Some(path) = &resolved.output {
        header.push("output", path.display());
    }
    header
}

pub fn run(args: Args) -> Result<i32, CliError> {
    let resolved = resolve(args)?;
    let (points, _) = load_input(&resolved.input)?.into_parts();
    let pool = CandidatePool::build(
        points,
        resolved.kernel.clone(),
        resolved.knn_k,
        EdgeWeight::Binary,
    )?;
    let features = FeatureMap::empirical(pool.gram())?;
    let regularizer = Regularizer::from_penalty(
        pool.smoothed_gram().view(),
        resolved.lambda_a,
        resolved.lambda_i,
    )?;
    let header = header_of(&resolved);
    header.print();

    if resolved.mode == "discrete" {
        let budget = resolved.budget.expect("checked during resolve");
        let selected = odoem_discrete(&features, &regularizer, budget)?;
        let uniform = ContinuousDesign::uniform_over(&selected, features.len())?;
        let information = information_matrix(&uniform, &features, &regularizer)?;
        let logdet = information.logdet()?;
        let gap = equivalence_gap_of(&information, &features, &regularizer)?;
        println!("p = {}", features.dim());
        println!("logdet = {logdet}");
        println!("gap = {gap}");
        println!("iterations = {budget}");
        if let Some(path) = &resolved.output {
            let mut body = String::from("k,index\n");
            for (k, index) in selected.iter().enumerate() {
                body.push_str(&csv_row(&[(k + 1).to_string(), index.to_string()]));
            }
            write_with_header(path, &header, &body)?;
        }
        return Ok(0);
    }

    let options = SolveOptions {
        tol: resolved.tol,
        max_iter: resolved.max_iter,
        step_rule: resolved.step_rule,
        ..SolveOptions::default()
    };
    let state = odoem_continuous(&features, &regularizer, &options)?;
    println!("p = {}", features.dim());
    println!("logdet = {}", state.logdet);
    println!("gap = {}", state.gap);
    println!("iterations = {}", state.iterations);
    println!("converged = {}", state.converged);
    if let Some(path) = &resolved.output {
        let mut body = String::from("index,weight\n");
        for (&index, &weight) in state.design.support().iter().zip(state.design.weights()) {
            body.push_str(&csv_row(&[index.to_string(), weight.to_string()]));
        }
        write_with_header(path, &header, &body)?;
    }
    if state.converged {
        Ok(0)
    } else {
        eprintln!(
            "design did not reach tol {} within {} iterations (gap {})",
            resolved.tol, resolved.max_iter, state.gap
        );
        Ok(EXIT_NUMERICAL)
    }
}
