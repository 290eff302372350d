//! Regularized D-optimal design over a finite candidate pool.
//!
//! The information matrix of a design q is `M(q) = sum_i q_i g(z_i) g(z_i)^T + C`
//! where `C = lambda_a I + lambda_i X^T L X` accounts for the regularizers of the
//! downstream model. The continuous solver follows the steepest feasible
//! direction: move mass toward the candidate with the largest predictive
//! variance `d(z) = g(z)^T M^{-1} g(z)`, with a step size that guarantees the
//! determinant never decreases. Optimality is certified by the equivalence
//! gap `max_z d(z) - (p - tr(M^{-1} C))`, which is zero exactly at the
//! optimum and is always computed from the two independent routes (a variance
//! scan and a trace of solves) rather than from any cached identity.

use crate::graph::LaplacianMatrix;
use crate::kernels::GramMatrix;
use crate::numerics::{NumericsError, SpdMatrix};
use ndarray::{Array2, ArrayView1, ArrayView2};
use thiserror::Error;

/// Weights summing to anything within this of 1 are accepted as a
/// probability vector; anything further off is a construction bug upstream.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Support weights below this are dropped and the design renormalized; kept
/// in sync with the convergence tolerances so pruning never moves the gap
/// by more than roundoff.
pub const PRUNE_TOL: f64 = 1e-10;

/// A candidate whose weight is within this of 1 is the whole design already;
/// stepping toward it again would be a no-op and it is skipped in the argmax.
const SATURATED: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("candidate index {index} out of range for pool of {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("design weights must be nonnegative and sum to 1 (got sum {sum})")]
    InvalidWeights { sum: f64 },
    #[error("design support contains duplicate index {index}")]
    DuplicateSupport { index: usize },
    #[error("ridge weight must be positive, got {0}")]
    NonPositiveRidge(f64),
    #[error("smoothness weight must be nonnegative, got {0}")]
    NegativeSmoothness(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("design is already optimal: step direction has no ascent (tau <= 0)")]
    AlreadyOptimal,
    #[error("budget {budget} exceeds pool size {n}")]
    BudgetExceedsPool { budget: usize, n: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How candidate points are embedded as regression features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// `g(z)` is the ambient coordinate vector itself (linear model).
    ExplicitCoordinates,
    /// `g(z_i)` is the i-th column of the pool Gram matrix, so `p = n` and
    /// the design optimizes the kernel model directly.
    EmpiricalKernelMap,
}

/// The feature matrix of the pool: row `i` holds `g(z_i)^T`.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    kind: FeatureKind,
    rows: Array2<f64>,
}

impl FeatureMap {
    /// Uses ambient coordinates as features.
    pub fn explicit(points: ArrayView2<f64>) -> Result<Self, DesignError> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(DesignError::EmptyPool);
        }
        Ok(FeatureMap {
            kind: FeatureKind::ExplicitCoordinates,
            rows: points.to_owned(),
        })
    }

    /// Uses kernel sections as features: `g(z_i) = K[:, i]`. Requires the
    /// square pool Gram matrix.
    pub fn empirical(gram: &GramMatrix) -> Result<Self, DesignError> {
        let k = gram.values();
        if k.nrows() == 0 {
            return Err(DesignError::EmptyPool);
        }
        if k.nrows() != k.ncols() {
            return Err(DesignError::DimensionMismatch {
                expected: k.nrows(),
                found: k.ncols(),
            });
        }
        // K is symmetric, so rows double as columns.
        Ok(FeatureMap {
            kind: FeatureKind::EmpiricalKernelMap,
            rows: k.clone(),
        })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    /// Number of candidates.
    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    /// Feature dimension `p`.
    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn feature_of(&self, index: usize) -> Result<ArrayView1<'_, f64>, DesignError> {
        if index >= self.len() {
            return Err(DesignError::IndexOutOfRange {
                index,
                n: self.len(),
            });
        }
        Ok(self.rows.row(index))
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.rows
    }
}

/// A probability measure over candidate indices. The support is kept sorted
/// and duplicate-free; weights are nonnegative and sum to 1 (the empty design
/// is the single exception, used as a cold-start state).
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousDesign {
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl ContinuousDesign {
    pub fn new(
        support: Vec<usize>,
        weights: Vec<f64>,
        pool_size: usize,
    ) -> Result<Self, DesignError> {
        if support.len() != weights.len() {
            return Err(DesignError::DimensionMismatch {
                expected: support.len(),
                found: weights.len(),
            });
        }
        if support.is_empty() {
            return Ok(ContinuousDesign::empty());
        }
        let mut pairs: Vec<(usize, f64)> = support.into_iter().zip(weights.into_iter()).collect();
        pairs.sort_by_key(|&(i, _)| i);
        let mut sum = 0.0;
        for w in 0..pairs.len() {
            let (index, weight) = pairs[w];
            if index >= pool_size {
                return Err(DesignError::IndexOutOfRange {
                    index,
                    n: pool_size,
                });
            }
            if w > 0 && pairs[w - 1].0 == index {
                return Err(DesignError::DuplicateSupport { index });
            }
            if !(weight >= 0.0) {
                return Err(DesignError::InvalidWeights { sum: weight });
            }
            sum += weight;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(DesignError::InvalidWeights { sum });
        }
        let (support, weights) = pairs.into_iter().unzip();
        Ok(ContinuousDesign { support, weights })
    }

    /// The zero measure: no mass anywhere. Only valid as an initial state.
    pub fn empty() -> Self {
        ContinuousDesign {
            support: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Uniform weights over the whole pool.
    pub fn uniform(pool_size: usize) -> Result<Self, DesignError> {
        if pool_size == 0 {
            return Err(DesignError::EmptyPool);
        }
        let w = 1.0 / pool_size as f64;
        Ok(ContinuousDesign {
            support: (0..pool_size).collect(),
            weights: vec![w; pool_size],
        })
    }

    /// Uniform weights over a chosen subset.
    pub fn uniform_over(indices: &[usize], pool_size: usize) -> Result<Self, DesignError> {
        let w = 1.0 / indices.len() as f64;
        ContinuousDesign::new(indices.to_vec(), vec![w; indices.len()], pool_size)
    }

    /// All mass on one candidate.
    pub fn point_mass(index: usize, pool_size: usize) -> Result<Self, DesignError> {
        ContinuousDesign::new(vec![index], vec![1.0], pool_size)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Weight on a candidate, zero when outside the support.
    pub fn weight_of(&self, index: usize) -> f64 {
        match self.support.binary_search(&index) {
            Ok(pos) => self.weights[pos],
            Err(_) => 0.0,
        }
    }

    /// The convex combination `(1 - alpha) self + alpha other`.
    pub fn mixture(&self, other: &Self, alpha: f64) -> Self {
        let mut support = Vec::with_capacity(self.support.len() + other.support.len());
        let mut weights = Vec::with_capacity(support.capacity());
        let (mut a, mut b) = (0, 0);
        while a < self.support.len() || b < other.support.len() {
            let ia = self.support.get(a).copied();
            let ib = other.support.get(b).copied();
            let (idx, w) = match (ia, ib) {
                (Some(i), Some(j)) if i == j => {
                    let w = (1.0 - alpha) * self.weights[a] + alpha * other.weights[b];
                    a += 1;
                    b += 1;
                    (i, w)
                }
                (Some(i), Some(j)) if i < j => {
                    let w = (1.0 - alpha) * self.weights[a];
                    a += 1;
                    (i, w)
                }
                (Some(_), Some(j)) => {
                    let w = alpha * other.weights[b];
                    b += 1;
                    (j, w)
                }
                (Some(i), None) => {
                    let w = (1.0 - alpha) * self.weights[a];
                    a += 1;
                    (i, w)
                }
                (None, Some(j)) => {
                    let w = alpha * other.weights[b];
                    b += 1;
                    (j, w)
                }
                (None, None) => unreachable!(),
            };
            support.push(idx);
            weights.push(w);
        }
        ContinuousDesign { support, weights }
    }

    /// Moves mass `alpha` onto `index`, shrinking everything else by
    /// `1 - alpha`. The caller guarantees `index` is in range.
    fn step_toward(&mut self, index: usize, alpha: f64) {
        for w in &mut self.weights {
            *w *= 1.0 - alpha;
        }
        match self.support.binary_search(&index) {
            Ok(pos) => self.weights[pos] += alpha,
            Err(pos) => {
                self.support.insert(pos, index);
                self.weights.insert(pos, alpha);
            }
        }
    }

    /// Drops support points with weight below `PRUNE_TOL` and renormalizes.
    /// Returns true when anything was removed.
    fn prune(&mut self) -> bool {
        let before = self.support.len();
        let mut kept_support = Vec::with_capacity(before);
        let mut kept_weights = Vec::with_capacity(before);
        for (i, &w) in self.support.iter().zip(self.weights.iter()) {
            if w >= PRUNE_TOL {
                kept_support.push(*i);
                kept_weights.push(w);
            }
        }
        if kept_support.len() == before {
            return false;
        }
        let total: f64 = kept_weights.iter().sum();
        for w in &mut kept_weights {
            *w /= total;
        }
        self.support = kept_support;
        self.weights = kept_weights;
        true
    }
}

/// The fixed part of every information matrix:
/// `C = lambda_a I + lambda_i X^T L X`.
#[derive(Debug, Clone)]
pub struct Regularizer {
    matrix: SpdMatrix,
    lambda_a: f64,
    lambda_i: f64,
}

impl Regularizer {
    pub fn new(
        features: &FeatureMap,
        laplacian: &LaplacianMatrix,
        lambda_a: f64,
        lambda_i: f64,
    ) -> Result<Self, DesignError> {
        if !(lambda_a > 0.0) {
            return Err(DesignError::NonPositiveRidge(lambda_a));
        }
        if !(lambda_i >= 0.0) {
            return Err(DesignError::NegativeSmoothness(lambda_i));
        }
        if laplacian.dim() != features.len() {
            return Err(DesignError::DimensionMismatch {
                expected: features.len(),
                found: laplacian.dim(),
            });
        }
        let p = features.dim();
        let mut c = if lambda_i > 0.0 {
            let x = features.matrix();
            let lx = laplacian.values().dot(x);
            let mut xtlx = x.t().dot(&lx);
            xtlx.mapv_inplace(|v| v * lambda_i);
            xtlx
        } else {
            Array2::zeros((p, p))
        };
        for i in 0..p {
            c[(i, i)] += lambda_a;
        }
        Ok(Regularizer {
            matrix: SpdMatrix::from_symmetrized(c)?,
            lambda_a,
            lambda_i,
        })
    }

    /// Builds `C = lambda_a I + lambda_i P` from a precomputed smoothness
    /// penalty `P = X^T L X`, so schedule sweeps do not redo the triple
    /// product.
    pub fn from_penalty(
        penalty: ArrayView2<f64>,
        lambda_a: f64,
        lambda_i: f64,
    ) -> Result<Self, DesignError> {
        if !(lambda_a > 0.0) {
            return Err(DesignError::NonPositiveRidge(lambda_a));
        }
        if !(lambda_i >= 0.0) {
            return Err(DesignError::NegativeSmoothness(lambda_i));
        }
        if penalty.nrows() != penalty.ncols() {
            return Err(DesignError::DimensionMismatch {
                expected: penalty.nrows(),
                found: penalty.ncols(),
            });
        }
        let p = penalty.nrows();
        let mut c = if lambda_i > 0.0 {
            penalty.mapv(|v| v * lambda_i)
        } else {
            Array2::zeros((p, p))
        };
        for i in 0..p {
            c[(i, i)] += lambda_a;
        }
        Ok(Regularizer {
            matrix: SpdMatrix::from_symmetrized(c)?,
            lambda_a,
            lambda_i,
        })
    }

    /// `C = lambda_a I`, the ridge-only regularizer used by designs that
    /// ignore manifold structure.
    pub fn ridge_only(p: usize, lambda_a: f64) -> Result<Self, DesignError> {
        if !(lambda_a > 0.0) {
            return Err(DesignError::NonPositiveRidge(lambda_a));
        }
        if p == 0 {
            return Err(DesignError::EmptyPool);
        }
        let mut c = Array2::zeros((p, p));
        for i in 0..p {
            c[(i, i)] = lambda_a;
        }
        Ok(Regularizer {
            matrix: SpdMatrix::from_symmetrized(c)?,
            lambda_a,
            lambda_i: 0.0,
        })
    }

    pub fn matrix(&self) -> &SpdMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn lambda_i(&self) -> f64 {
        self.lambda_i
    }
}

/// Snapshot of a continuous-design run.
#[derive(Debug, Clone)]
pub struct DesignState {
    pub design: ContinuousDesign,
    pub information: SpdMatrix,
    pub logdet: f64,
    pub gap: f64,
    /// Evaluation passes performed (each pass certifies the gap and, unless
    /// converged, takes one step).
    pub iterations: usize,
    pub converged: bool,
    pub logdet_trace: Vec<f64>,
    pub gap_trace: Vec<f64>,
}

/// Step-size rule for the continuous solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepRule {
    /// Closed-form bound `tau / (p (p + tau - 1))`, guaranteed monotone.
    #[default]
    MonotoneBound,
    /// Golden-section search of the determinant along the segment.
    LineSearch,
}

/// Initial design for the continuous solver.
#[derive(Debug, Clone, Default)]
pub enum InitDesign {
    /// Uniform over the pool.
    #[default]
    Uniform,
    /// No mass; the first step places a point mass on the best candidate.
    Empty,
    /// Uniform over the given indices.
    Indices(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub step_rule: StepRule,
    pub init: InitDesign,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-6,
            max_iter: 5000,
            step_rule: StepRule::MonotoneBound,
            init: InitDesign::Uniform,
        }
    }
}

/// `M(q) = sum_i q_i g_i g_i^T + C`.
pub fn information_matrix(
    design: &ContinuousDesign,
    features: &FeatureMap,
    regularizer: &Regularizer,
) -> Result<SpdMatrix, DesignError> {
    let p = features.dim();
    if regularizer.dim() != p {
        return Err(DesignError::DimensionMismatch {
            expected: p,
            found: regularizer.dim(),
        });
    }
    let mut m = regularizer.matrix().entries().clone();
    for (&idx, &q) in design.support().iter().zip(design.weights().iter()) {
        let g = features.feature_of(idx)?;
        accumulate_outer(&mut m, g, q);
    }
    mirror_lower(&mut m);
    Ok(SpdMatrix::new(m)?)
}

/// `M = sum_{i in indices} g_i g_i^T + C`: the unnormalized information of a
/// discrete batch with unit weights.
pub fn unit_weight_information(
    indices: &[usize],
    features: &FeatureMap,
    regularizer: &Regularizer,
) -> Result<SpdMatrix, DesignError> {
    let p = features.dim();
    if regularizer.dim() != p {
        return Err(DesignError::DimensionMismatch {
            expected: p,
            found: regularizer.dim(),
        });
    }
    let mut m = regularizer.matrix().entries().clone();
    for &idx in indices {
        let g = features.feature_of(idx)?;
        accumulate_outer(&mut m, g, 1.0);
    }
    mirror_lower(&mut m);
    Ok(SpdMatrix::new(m)?)
}

/// Adds `q * g g^T` to the lower triangle of `m`.
fn accumulate_outer(m: &mut Array2<f64>, g: ArrayView1<f64>, q: f64) {
    let p = g.len();
    for i in 0..p {
        let gi = q * g[i];
        for j in 0..=i {
            m[(i, j)] += gi * g[j];
        }
    }
}

/// Copies the lower triangle onto the upper one so symmetry is exact.
fn mirror_lower(m: &mut Array2<f64>) {
    for i in 0..m.nrows() {
        for j in 0..i {
            m[(j, i)] = m[(i, j)];
        }
    }
}

/// Predictive variance `d(z) = g(z)^T M^{-1} g(z)` of one candidate under the
/// current state.
pub fn pred_variance(
    candidate: usize,
    state: &DesignState,
    features: &FeatureMap,
) -> Result<f64, DesignError> {
    let g = features.feature_of(candidate)?;
    Ok(state.information.cholesky()?.quad_inverse(g))
}

/// Predictive variances of every candidate under one information matrix.
pub fn pred_variances_all(
    information: &SpdMatrix,
    features: &FeatureMap,
) -> Result<Vec<f64>, DesignError> {
    if information.dim() != features.dim() {
        return Err(DesignError::DimensionMismatch {
            expected: features.dim(),
            found: information.dim(),
        });
    }
    let factor = information.cholesky()?;
    let mut d = Vec::with_capacity(features.len());
    for i in 0..features.len() {
        d.push(factor.quad_inverse(features.feature_of(i)?));
    }
    Ok(d)
}

/// Optimality certificate `max_z d(z) - (p - tr(M^{-1} C))` for an arbitrary
/// information matrix. Zero at the optimum, positive away from it; both terms
/// are computed independently so the certificate cannot be fooled by a stale
/// cached identity.
pub fn equivalence_gap_of(
    information: &SpdMatrix,
    features: &FeatureMap,
    regularizer: &Regularizer,
) -> Result<f64, DesignError> {
    let d = pred_variances_all(information, features)?;
    let d_max = d.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let trace = information
        .cholesky()?
        .inv_trace_product(regularizer.matrix().entries());
    Ok(d_max - (features.dim() as f64 - trace))
}

/// Optimality certificate of a design state (recomputed, not read from the
/// state's cached field).
pub fn equivalence_gap(
    state: &DesignState,
    features: &FeatureMap,
    regularizer: &Regularizer,
) -> Result<f64, DesignError> {
    equivalence_gap_of(&state.information, features, regularizer)
}

/// Monotone step size `tau / (p (p + tau - 1))` where
/// `tau = d_max - (p - trace_mc)`. Fails with `AlreadyOptimal` when the
/// direction has no ascent. Clamped below 1 so the previous design always
/// keeps positive weight.
pub fn step_size_bound(d_max: f64, p: usize, trace_mc: f64) -> Result<f64, DesignError> {
    if p == 0 {
        return Err(DesignError::EmptyPool);
    }
    let pf = p as f64;
    let tau = d_max - (pf - trace_mc);
    if tau <= 0.0 {
        return Err(DesignError::AlreadyOptimal);
    }
    let alpha = tau / (pf * (pf + tau - 1.0));
    Ok(alpha.min(SATURATED))
}

/// Continuous regularized D-optimal design by sequential mass moves.
///
/// Each pass factors `M`, scans predictive variances, certifies the
/// equivalence gap, and (unless converged or out of passes) mixes a point
/// mass on the worst-predicted candidate into the design. Support points
/// whose weight falls below `PRUNE_TOL` are dropped and the information
/// matrix rebuilt from scratch, which also curbs drift from the incremental
/// updates.
pub fn odoem_continuous(
    features: &FeatureMap,
    regularizer: &Regularizer,
    options: &SolveOptions,
) -> Result<DesignState, DesignError> {
    let n = features.len();
    let p = features.dim();
    if n == 0 {
        return Err(DesignError::EmptyPool);
    }
    if regularizer.dim() != p {
        return Err(DesignError::DimensionMismatch {
            expected: p,
            found: regularizer.dim(),
        });
    }
    if !(options.tol > 0.0) {
        return Err(DesignError::InvalidTolerance(options.tol));
    }
    if options.max_iter == 0 {
        return Err(DesignError::InvalidTolerance(0.0));
    }

    let mut design = match &options.init {
        InitDesign::Uniform => ContinuousDesign::uniform(n)?,
        InitDesign::Empty => ContinuousDesign::empty(),
        InitDesign::Indices(idx) => ContinuousDesign::uniform_over(idx, n)?,
    };
    let mut information = information_matrix(&design, features, regularizer)?;

    let mut logdet_trace = Vec::new();
    let mut gap_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    loop {
        iterations += 1;
        let factor = information.cholesky()?;
        let logdet = factor.logdet();
        let trace_mc = factor.inv_trace_product(regularizer.matrix().entries());
        let dual_floor = p as f64 - trace_mc;

        let mut d = Vec::with_capacity(n);
        let mut d_max = f64::NEG_INFINITY;
        for i in 0..n {
            let di = factor.quad_inverse(features.feature_of(i)?);
            if di > d_max {
                d_max = di;
            }
            d.push(di);
        }
        let gap = d_max - dual_floor;
        logdet_trace.push(logdet);
        gap_trace.push(gap);

        if gap <= options.tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }

        // Best candidate that can still absorb mass; ties go to the lower
        // index because the comparison is strict.
        let mut best: Option<usize> = None;
        for i in 0..n {
            if design.weight_of(i) >= SATURATED {
                continue;
            }
            if best.map_or(true, |b| d[i] > d[b]) {
                best = Some(i);
            }
        }
        let Some(z) = best else { break };

        if design.is_empty() {
            // Cold start: the first step is the whole budget.
            design = ContinuousDesign::point_mass(z, n)?;
            information = information_matrix(&design, features, regularizer)?;
            continue;
        }

        let tau_step = d[z] - dual_floor;
        if tau_step <= 0.0 {
            break;
        }
        let alpha = match options.step_rule {
            StepRule::MonotoneBound => step_size_bound(d[z], p, trace_mc)?,
            StepRule::LineSearch => {
                line_search_alpha(&information, features.feature_of(z)?, regularizer)
            }
        };

        design.step_toward(z, alpha);
        if design.prune() {
            information = information_matrix(&design, features, regularizer)?;
        } else {
            information =
                mixed_information(&information, features.feature_of(z)?, regularizer, alpha)?;
        }
    }

    let logdet = *logdet_trace.last().expect("at least one pass ran");
    let gap = *gap_trace.last().expect("at least one pass ran");
    Ok(DesignState {
        design,
        information,
        logdet,
        gap,
        iterations,
        converged,
        logdet_trace,
        gap_trace,
    })
}

/// `(1 - alpha) M + alpha (g g^T + C)`, built exactly symmetric.
fn mixed_information(
    information: &SpdMatrix,
    g: ArrayView1<f64>,
    regularizer: &Regularizer,
    alpha: f64,
) -> Result<SpdMatrix, DesignError> {
    let m = information.entries();
    let c = regularizer.matrix().entries();
    let p = g.len();
    let mut out = Array2::zeros((p, p));
    for i in 0..p {
        for j in 0..=i {
            let v = (1.0 - alpha) * m[(i, j)] + alpha * (g[i] * g[j] + c[(i, j)]);
            out[(i, j)] = v;
        }
    }
    mirror_lower(&mut out);
    Ok(SpdMatrix::new(out)?)
}

/// Log-determinant of the mixture, or negative infinity when the factorization
/// fails at the extreme end of the segment.
fn mixture_logdet(
    information: &SpdMatrix,
    g: ArrayView1<f64>,
    regularizer: &Regularizer,
    alpha: f64,
) -> f64 {
    match mixed_information(information, g, regularizer, alpha) {
        Ok(m) => m.logdet().unwrap_or(f64::NEG_INFINITY),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Golden-section maximization of the mixture log-determinant over
/// `alpha in (0, 1)`. The objective is smooth and unimodal on the segment.
fn line_search_alpha(
    information: &SpdMatrix,
    g: ArrayView1<f64>,
    regularizer: &Regularizer,
) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (0.0_f64, SATURATED);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = mixture_logdet(information, g, regularizer, x1);
    let mut f2 = mixture_logdet(information, g, regularizer, x2);
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = mixture_logdet(information, g, regularizer, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = mixture_logdet(information, g, regularizer, x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    // Never return a zero step: the caller already verified ascent exists.
    mid.max(1e-12)
}

/// Both sides of the one-step determinant identity, as log-determinants:
/// the left side factors the mixed matrix directly, the right side predicts
/// it from the current factorization,
/// `p ln(1-alpha) + ln det M + ln(1 + beta (d + tr(M^{-1} C_step)))`
/// with `beta = alpha / (1 - alpha)`. `step_regularizer` controls whether the
/// step adds `g g^T + C` (the design update) or a bare `g g^T`, for which the
/// identity is exact.
pub fn mixture_logdet_sides(
    information: &SpdMatrix,
    g: ArrayView1<f64>,
    regularizer: &Regularizer,
    step_regularizer: bool,
    alpha: f64,
) -> Result<(f64, f64), DesignError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DesignError::InvalidTolerance(alpha));
    }
    let p = information.dim();
    if g.len() != p {
        return Err(DesignError::DimensionMismatch {
            expected: p,
            found: g.len(),
        });
    }
    let factor = information.cholesky()?;
    let d = factor.quad_inverse(g);
    let beta = alpha / (1.0 - alpha);

    let c = regularizer.matrix().entries();
    let (lhs_matrix, trace_term) = if step_regularizer {
        let mixed = mixed_information(information, g, regularizer, alpha)?;
        let trace = factor.inv_trace_product(c);
        (mixed, trace)
    } else {
        let m = information.entries();
        let mut out = Array2::zeros((p, p));
        for i in 0..p {
            for j in 0..=i {
                out[(i, j)] = (1.0 - alpha) * m[(i, j)] + alpha * g[i] * g[j];
            }
        }
        mirror_lower(&mut out);
        (SpdMatrix::new(out)?, 0.0)
    };

    let lhs = lhs_matrix.logdet()?;
    let rhs =
        p as f64 * (1.0 - alpha).ln() + factor.logdet() + (1.0 + beta * (d + trace_term)).ln();
    Ok((lhs, rhs))
}

/// Greedy step of the discrete design: the unlabeled candidate with the
/// largest predictive variance under `M = sum_{selected} g g^T + C`. Returns
/// `None` when every candidate is already selected.
pub fn greedy_variance_next(
    selected: &[usize],
    features: &FeatureMap,
    regularizer: &Regularizer,
) -> Result<Option<usize>, DesignError> {
    let n = features.len();
    let mut taken = vec![false; n];
    for &i in selected {
        if i >= n {
            return Err(DesignError::IndexOutOfRange { index: i, n });
        }
        taken[i] = true;
    }
    let information = unit_weight_information(selected, features, regularizer)?;
    let factor = information.cholesky()?;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        if taken[i] {
            continue;
        }
        let di = factor.quad_inverse(features.feature_of(i)?);
        if best.map_or(true, |(_, bd)| di > bd) {
            best = Some((i, di));
        }
    }
    Ok(best.map(|(i, _)| i))
}

/// Sequential discrete design: pick `budget` candidates one at a time, each
/// the variance maximizer under the information of everything chosen so far.
pub fn odoem_discrete(
    features: &FeatureMap,
    regularizer: &Regularizer,
    budget: usize,
) -> Result<Vec<usize>, DesignError> {
    let n = features.len();
    if n == 0 {
        return Err(DesignError::EmptyPool);
    }
    if budget > n {
        return Err(DesignError::BudgetExceedsPool { budget, n });
    }
    let mut selected = Vec::with_capacity(budget);
    for _ in 0..budget {
        let next = greedy_variance_next(&selected, features, regularizer)?
            .expect("budget <= n leaves an unlabeled candidate");
        selected.push(next);
    }
    Ok(selected)
}
