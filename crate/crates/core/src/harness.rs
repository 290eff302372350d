//! Sequential benchmark protocol: a selection strategy proposes candidates
//! one at a time, labels are revealed as chosen, the model is refit after
//! every reveal, and the mean squared error over the whole pool is traced.
//!
//! Strategies see coordinates, the graph, and which indices are labeled,
//! never the label values themselves, so selection quality cannot leak from
//! the ground truth. The manifold-aware strategy both selects and fits with
//! the scheduled smoothness weight; every other strategy is paired with a
//! plain kernel ridge fit.

use crate::baselines::{
    classical_d_next, l2_discrepancy_next, maximin_next, minimax_next, random_next, BaselineError,
    StrategySpec,
};
use crate::datasets::{ImageDataset, ManifoldDataset};
use crate::design::{
    equivalence_gap_of, greedy_variance_next, information_matrix, unit_weight_information,
    ContinuousDesign, DesignError, FeatureMap, Regularizer,
};
use crate::graph::EdgeWeight;
use crate::kernels::KernelSpec;
use crate::laprls::{fit_coefficients, LabeledSet, LapRlsError};
use crate::numerics::NumericsError;
use crate::pool::{CandidatePool, PoolError};
use ndarray::{Array1, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("schedule step k = {k} outside [1, {n}]")]
    ScheduleOutOfRange { k: usize, n: usize },
    #[error("constant smoothness weight must be nonnegative, got {0}")]
    NegativeConstant(f64),
    #[error("budget {budget} exceeds pool size {n}")]
    BudgetExceedsPool { budget: usize, n: usize },
    #[error("{points} points but {labels} labels")]
    LabelCountMismatch { points: usize, labels: usize },
    #[error("config kernel differs from the prepared dataset's kernel")]
    KernelMismatch,
    #[error("config knn_k = {config} differs from the prepared graph's {prepared}")]
    GraphMismatch { config: usize, prepared: usize },
    #[error("compare needs at least one config")]
    EmptyConfigs,
    #[error("compare configs disagree on {0}")]
    MixedConfigs(&'static str),
    #[error(transparent)]
    Pool(#[from] PoolError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Model(#[from] LapRlsError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Smoothness-weight schedule over the labeling run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSchedule {
    /// `-ln(k/n)`: strong smoothing early, exactly zero once everything is
    /// labeled.
    NegLogFraction,
    /// A fixed weight; `Constant(0.0)` turns the fit into kernel ridge.
    Constant(f64),
}

impl LambdaSchedule {
    pub fn value(&self, k: usize, n: usize) -> Result<f64, HarnessError> {
        match self {
            LambdaSchedule::NegLogFraction => lambda_i_schedule(k, n),
            LambdaSchedule::Constant(c) => {
                if !(*c >= 0.0) {
                    return Err(HarnessError::NegativeConstant(*c));
                }
                Ok(*c)
            }
        }
    }
}

/// `-ln(k/n)` for `1 <= k <= n`: decreasing in k and exactly 0 at `k = n`.
pub fn lambda_i_schedule(k: usize, n: usize) -> Result<f64, HarnessError> {
    if k == 0 || k > n {
        return Err(HarnessError::ScheduleOutOfRange { k, n });
    }
    Ok(-((k as f64 / n as f64).ln()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub strategy: StrategySpec,
    pub kernel: KernelSpec,
    pub lambda_a: f64,
    pub schedule: LambdaSchedule,
    pub budget: usize,
    pub knn_k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Number of labels revealed so far (1-based).
    pub k: usize,
    /// Candidate chosen at this step.
    pub index: usize,
    /// Smoothness weight used in this step's fit.
    pub lambda_i: f64,
    /// Mean squared error over the whole pool.
    pub mse: f64,
    /// Log-determinant of the unnormalized information of the selection.
    pub logdet: f64,
    /// Equivalence gap of the uniformly weighted selection.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub strategy: String,
    pub seed: u64,
    pub records: Vec<IterationRecord>,
}

impl LearningCurve {
    pub fn final_mse(&self) -> Option<f64> {
        self.records.last().map(|r| r.mse)
    }

    /// Area under the MSE curve: the plain sum of per-step MSE values.
    pub fn auc(&self) -> f64 {
        self.records.iter().map(|r| r.mse).sum()
    }
}

/// A dataset made ready for benchmarking: pool structures and the empirical
/// feature map built once, then shared across every strategy for fairness.
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pool: CandidatePool,
    features: FeatureMap,
    labels: Array1<f64>,
    knn_k: usize,
}

impl PreparedDataset {
    pub fn new(
        points: ndarray::Array2<f64>,
        labels: Array1<f64>,
        kernel: KernelSpec,
        knn_k: usize,
    ) -> Result<Self, HarnessError> {
        if points.nrows() != labels.len() {
            return Err(HarnessError::LabelCountMismatch {
                points: points.nrows(),
                labels: labels.len(),
            });
        }
        let pool = CandidatePool::build(points, kernel, knn_k, EdgeWeight::Binary)?;
        let features = FeatureMap::empirical(pool.gram())?;
        Ok(PreparedDataset {
            pool,
            features,
            labels,
            knn_k,
        })
    }

    pub fn from_manifold(
        dataset: &ManifoldDataset,
        kernel: KernelSpec,
        knn_k: usize,
    ) -> Result<Self, HarnessError> {
        PreparedDataset::new(
            dataset.points.clone(),
            dataset.labels.clone(),
            kernel,
            knn_k,
        )
    }

    pub fn from_images(
        dataset: &ImageDataset,
        kernel: KernelSpec,
        knn_k: usize,
    ) -> Result<Self, HarnessError> {
        PreparedDataset::new(
            dataset.vectors.clone(),
            Array1::from(dataset.angles.clone()),
            kernel,
            knn_k,
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn pool(&self) -> &CandidatePool {
        &self.pool
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn labels(&self) -> ArrayView1<'_, f64> {
        self.labels.view()
    }
}

/// Mean squared error with a fixed left-to-right summation order, so
/// recomputation from the same inputs is bit-identical.
pub fn mean_squared_error(labels: ArrayView1<f64>, predictions: ArrayView1<f64>) -> f64 {
    let mut total = 0.0;
    for (y, f) in labels.iter().zip(predictions.iter()) {
        let r = y - f;
        total += r * r;
    }
    total / labels.len() as f64
}

/// Runs one strategy over the prepared dataset: reveal, refit, trace.
pub fn run_experiment(
    config: &ExperimentConfig,
    data: &PreparedDataset,
) -> Result<LearningCurve, HarnessError> {
    let n = data.len();
    if config.budget > n {
        return Err(HarnessError::BudgetExceedsPool {
            budget: config.budget,
            n,
        });
    }
    if config.kernel != *data.pool.kernel() {
        return Err(HarnessError::KernelMismatch);
    }
    if config.knn_k != data.knn_k {
        return Err(HarnessError::GraphMismatch {
            config: config.knn_k,
            prepared: data.knn_k,
        });
    }

    let features = &data.features;
    let penalty = data.pool.smoothed_gram();
    let mut rng = match &config.strategy {
        StrategySpec::Random { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };

    let mut labeled: Vec<usize> = Vec::with_capacity(config.budget);
    let mut revealed: Vec<f64> = Vec::with_capacity(config.budget);
    let mut records = Vec::with_capacity(config.budget);

    for k in 1..=config.budget {
        let lambda_i = match config.strategy {
            StrategySpec::Odoem => config.schedule.value(k, n)?,
            _ => 0.0,
        };

        let index = match &config.strategy {
            StrategySpec::Odoem => {
                let c = Regularizer::from_penalty(penalty.view(), config.lambda_a, lambda_i)?;
                greedy_variance_next(&labeled, features, &c)?.ok_or(BaselineError::PoolExhausted)?
            }
            StrategySpec::ClassicalD => classical_d_next(features, &labeled, config.lambda_a)?,
            StrategySpec::Random { .. } => {
                random_next(n, &labeled, rng.as_mut().expect("rng built for random"))?
            }
            StrategySpec::UniformMaximin => maximin_next(data.pool.points(), &labeled)?,
            StrategySpec::UniformMinimax => minimax_next(data.pool.points(), &labeled)?,
            StrategySpec::UniformL2Discrepancy => {
                l2_discrepancy_next(data.pool.points(), &labeled)?
            }
        };
        labeled.push(index);
        revealed.push(data.labels[index]);

        let labeled_set = LabeledSet::new(labeled.clone(), revealed.clone(), n)?;
        let model = fit_coefficients(&data.pool, &labeled_set, config.lambda_a, lambda_i)?;
        let predictions = model.predict_pool(&data.pool)?;
        let mse = mean_squared_error(data.labels(), predictions.view());

        let diag = Regularizer::from_penalty(penalty.view(), config.lambda_a, lambda_i)?;
        let unnormalized = unit_weight_information(&labeled, features, &diag)?;
        let logdet = unnormalized.logdet()?;
        let uniform = ContinuousDesign::uniform_over(&labeled, n)?;
        let normalized = information_matrix(&uniform, features, &diag)?;
        let gap = equivalence_gap_of(&normalized, features, &diag)?;

        records.push(IterationRecord {
            k,
            index,
            lambda_i,
            mse,
            logdet,
            gap,
        });
    }

    Ok(LearningCurve {
        strategy: config.strategy.label().to_string(),
        seed: config.seed,
        records,
    })
}

/// Aligned learning curves for several configs on one dataset, with
/// per-config summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub budget: usize,
    pub labels: Vec<String>,
    pub curves: Vec<LearningCurve>,
    pub auc: Vec<f64>,
    pub final_mse: Vec<f64>,
}

/// Runs every config on the shared dataset and tabulates the MSE columns.
/// The configs must agree on budget, kernel, and graph so the columns are
/// comparable.
pub fn compare(
    configs: &[ExperimentConfig],
    data: &PreparedDataset,
) -> Result<ComparisonTable, HarnessError> {
    let Some(first) = configs.first() else {
        return Err(HarnessError::EmptyConfigs);
    };
    for config in configs {
        if config.budget != first.budget {
            return Err(HarnessError::MixedConfigs("budget"));
        }
        if config.kernel != first.kernel {
            return Err(HarnessError::MixedConfigs("kernel"));
        }
        if config.knn_k != first.knn_k {
            return Err(HarnessError::MixedConfigs("knn_k"));
        }
    }
    let mut labels = Vec::with_capacity(configs.len());
    let mut curves = Vec::with_capacity(configs.len());
    let mut auc = Vec::with_capacity(configs.len());
    let mut final_mse = Vec::with_capacity(configs.len());
    for config in configs {
        let curve = run_experiment(config, data)?;
        labels.push(format!("{}-{}", curve.strategy, curve.seed));
        auc.push(curve.auc());
        final_mse.push(curve.final_mse().unwrap_or(f64::NAN));
        curves.push(curve);
    }
    Ok(ComparisonTable {
        budget: first.budget,
        labels,
        curves,
        auc,
        final_mse,
    })
}
