//! Competing selection strategies: classical kernel D-optimal scoring that
//! ignores the manifold term, uniform random sampling, and greedy
//! space-filling designs (maximin, minimax, centered L2-discrepancy).
//!
//! All space-filling criteria are evaluated greedily, one pick at a time, in
//! the ambient space; the discrepancy criterion works on coordinates rescaled
//! to the unit box. Ties always go to the lowest candidate index.

use crate::design::{greedy_variance_next, DesignError, FeatureMap, Regularizer};
use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("no unlabeled candidates remain")]
    PoolExhausted,
    #[error("labeled index {index} out of range for pool of {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("unknown strategy {name:?}; valid names: {valid}")]
    UnknownStrategy { name: String, valid: &'static str },
    #[error(transparent)]
    Design(#[from] DesignError),
}

const STRATEGY_NAMES: &str = "odoem, classical-d, random, l2-discrepancy, minimax, maximin";

/// Which selection rule drives a benchmark run. `Random` carries its own
/// stream seed so the draw sequence is reproducible independently of any
/// other randomness in the experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    Odoem,
    ClassicalD,
    Random { seed: u64 },
    UniformL2Discrepancy,
    UniformMinimax,
    UniformMaximin,
}

impl StrategySpec {
    /// Parses a CLI-facing strategy name; `seed` is used only by `random`.
    pub fn from_name(name: &str, seed: u64) -> Result<Self, BaselineError> {
        match name {
            "odoem" => Ok(StrategySpec::Odoem),
            "classical-d" => Ok(StrategySpec::ClassicalD),
            "random" => Ok(StrategySpec::Random { seed }),
            "l2-discrepancy" => Ok(StrategySpec::UniformL2Discrepancy),
            "minimax" => Ok(StrategySpec::UniformMinimax),
            "maximin" => Ok(StrategySpec::UniformMaximin),
            _ => Err(BaselineError::UnknownStrategy {
                name: name.to_string(),
                valid: STRATEGY_NAMES,
            }),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            StrategySpec::Odoem => "odoem",
            StrategySpec::ClassicalD => "classical-d",
            StrategySpec::Random { .. } => "random",
            StrategySpec::UniformL2Discrepancy => "l2-discrepancy",
            StrategySpec::UniformMinimax => "minimax",
            StrategySpec::UniformMaximin => "maximin",
        }
    }
}

fn check_labeled(labeled: &[usize], n: usize) -> Result<Vec<bool>, BaselineError> {
    let mut taken = vec![false; n];
    for &i in labeled {
        if i >= n {
            return Err(BaselineError::IndexOutOfRange { index: i, n });
        }
        taken[i] = true;
    }
    Ok(taken)
}

fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        s += d * d;
    }
    s.sqrt()
}

/// Next pick of the classical kernel D-optimal design: the variance
/// maximizer under `M = sum_labeled g g^T + lambda_a I`, with no manifold
/// term at all.
pub fn classical_d_next(
    features: &FeatureMap,
    labeled: &[usize],
    lambda_a: f64,
) -> Result<usize, BaselineError> {
    let regularizer = Regularizer::ridge_only(features.dim(), lambda_a)?;
    greedy_variance_next(labeled, features, &regularizer)?.ok_or(BaselineError::PoolExhausted)
}

/// Uniform draw over the unlabeled candidates.
pub fn random_next<R: Rng>(
    pool_size: usize,
    labeled: &[usize],
    rng: &mut R,
) -> Result<usize, BaselineError> {
    let taken = check_labeled(labeled, pool_size)?;
    let unlabeled: Vec<usize> = (0..pool_size).filter(|&i| !taken[i]).collect();
    if unlabeled.is_empty() {
        return Err(BaselineError::PoolExhausted);
    }
    Ok(unlabeled[rng.gen_range(0..unlabeled.len())])
}

/// Greedy farthest-point pick: the unlabeled candidate whose distance to the
/// nearest labeled point is largest. With nothing labeled yet, the point
/// farthest from the pool centroid.
pub fn maximin_next(points: ArrayView2<f64>, labeled: &[usize]) -> Result<usize, BaselineError> {
    let n = points.nrows();
    let taken = check_labeled(labeled, n)?;
    let mut best: Option<(usize, f64)> = None;
    if labeled.is_empty() {
        let mut centroid = vec![0.0; points.ncols()];
        for row in points.rows() {
            for (c, v) in centroid.iter_mut().zip(row.iter()) {
                *c += v;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }
        let centroid = ndarray::Array1::from(centroid);
        for i in 0..n {
            let d = euclidean(points.row(i), centroid.view());
            if best.map_or(true, |(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
    } else {
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let mut nearest = f64::INFINITY;
            for &j in labeled {
                nearest = nearest.min(euclidean(points.row(i), points.row(j)));
            }
            if best.map_or(true, |(_, bd)| nearest > bd) {
                best = Some((i, nearest));
            }
        }
    }
    best.map(|(i, _)| i).ok_or(BaselineError::PoolExhausted)
}

/// Greedy covering pick: the unlabeled candidate that minimizes the covering
/// radius of `labeled + {z}` over the whole pool (the largest distance from
/// any pool point to its nearest selected point).
pub fn minimax_next(points: ArrayView2<f64>, labeled: &[usize]) -> Result<usize, BaselineError> {
    let n = points.nrows();
    let taken = check_labeled(labeled, n)?;
    // distance from each pool point to the current labeled set
    let mut to_labeled = vec![f64::INFINITY; n];
    for i in 0..n {
        for &j in labeled {
            to_labeled[i] = to_labeled[i].min(euclidean(points.row(i), points.row(j)));
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for z in 0..n {
        if taken[z] {
            continue;
        }
        let mut radius = 0.0_f64;
        for i in 0..n {
            let d = to_labeled[i].min(euclidean(points.row(i), points.row(z)));
            radius = radius.max(d);
        }
        if best.map_or(true, |(_, br)| radius < br) {
            best = Some((z, radius));
        }
    }
    best.map(|(z, _)| z).ok_or(BaselineError::PoolExhausted)
}

/// Rescales each coordinate to [0,1] by its pool-wide min and max; a
/// coordinate that is constant across the pool maps to 0.5.
pub fn rescale_to_unit_box(points: ArrayView2<f64>) -> Array2<f64> {
    let (n, d) = (points.nrows(), points.ncols());
    let mut out = Array2::zeros((n, d));
    for j in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            lo = lo.min(points[(i, j)]);
            hi = hi.max(points[(i, j)]);
        }
        let span = hi - lo;
        for i in 0..n {
            out[(i, j)] = if span > 0.0 {
                (points[(i, j)] - lo) / span
            } else {
                0.5
            };
        }
    }
    out
}

/// Squared centered L2-discrepancy of a point set in the unit box, by the
/// closed-form double sum.
pub fn centered_l2_discrepancy(points01: ArrayView2<f64>) -> f64 {
    let (m, d) = (points01.nrows(), points01.ncols());
    if m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    let mut single = 0.0;
    for i in 0..m {
        let mut prod = 1.0;
        for j in 0..d {
            let c = (points01[(i, j)] - 0.5).abs();
            prod *= 1.0 + 0.5 * c - 0.5 * c * c;
        }
        single += prod;
    }
    let mut double = 0.0;
    for i in 0..m {
        for i2 in 0..m {
            let mut prod = 1.0;
            for j in 0..d {
                let ci = (points01[(i, j)] - 0.5).abs();
                let ci2 = (points01[(i2, j)] - 0.5).abs();
                let cij = (points01[(i, j)] - points01[(i2, j)]).abs();
                prod *= 1.0 + 0.5 * ci + 0.5 * ci2 - 0.5 * cij;
            }
            double += prod;
        }
    }
    (13.0 / 12.0_f64).powi(d as i32) - 2.0 / mf * single + double / (mf * mf)
}

/// Greedy discrepancy pick: the unlabeled candidate that minimizes the
/// centered L2-discrepancy of `labeled + {z}` on unit-box-rescaled
/// coordinates.
pub fn l2_discrepancy_next(
    points: ArrayView2<f64>,
    labeled: &[usize],
) -> Result<usize, BaselineError> {
    let n = points.nrows();
    let taken = check_labeled(labeled, n)?;
    let unit = rescale_to_unit_box(points);
    let d = unit.ncols();
    let mut trial = Array2::zeros((labeled.len() + 1, d));
    for (r, &i) in labeled.iter().enumerate() {
        trial.row_mut(r).assign(&unit.row(i));
    }
    let last = labeled.len();
    let mut best: Option<(usize, f64)> = None;
    for z in 0..n {
        if taken[z] {
            continue;
        }
        trial.row_mut(last).assign(&unit.row(z));
        let disc = centered_l2_discrepancy(trial.view());
        if best.map_or(true, |(_, bd)| disc < bd) {
            best = Some((z, disc));
        }
    }
    best.map(|(z, _)| z).ok_or(BaselineError::PoolExhausted)
}
