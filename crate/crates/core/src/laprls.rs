//! Laplacian-regularized least squares in a kernel expansion over the pool.
//!
//! With labeled indices Z inside a pool X of n points, the fitted function is
//! `f(x) = sum_i alpha_i k(x_i, x)` with coefficients solving
//! `(K_XZ K_XZ^T + lambda_a K + lambda_i K L K) alpha = K_XZ y`.
//! The ridge term penalizes RKHS norm, the Laplacian term penalizes
//! roughness of `f` across graph edges, and with `lambda_i = 0` the fit
//! reduces to kernel ridge regression on the labeled subset.

use crate::design::{DesignError, FeatureMap, Regularizer};
use crate::graph::LaplacianMatrix;
use crate::kernels::{KernelError, KernelSpec};
use crate::numerics::{NumericsError, SpdMatrix};
use crate::pool::CandidatePool;
use ndarray::{Array1, Array2, ArrayView1};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LapRlsError {
    #[error("labeled set is empty")]
    EmptyLabeledSet,
    #[error("labeled index {index} appears more than once")]
    DuplicateIndex { index: usize },
    #[error("labeled index {index} out of range for pool of {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(
        "normal equations are singular at pivot {pivot_index}; \
             increase the ridge weight"
    )]
    SingularSystem { pivot_index: usize },
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Labeled indices into a pool, with their responses.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    indices: Vec<usize>,
    labels: Vec<f64>,
}

impl LabeledSet {
    pub fn new(
        indices: Vec<usize>,
        labels: Vec<f64>,
        pool_size: usize,
    ) -> Result<Self, LapRlsError> {
        if indices.len() != labels.len() {
            return Err(LapRlsError::DimensionMismatch {
                expected: indices.len(),
                found: labels.len(),
            });
        }
        if indices.is_empty() {
            return Err(LapRlsError::EmptyLabeledSet);
        }
        let mut seen = vec![false; pool_size];
        for &i in &indices {
            if i >= pool_size {
                return Err(LapRlsError::IndexOutOfRange {
                    index: i,
                    n: pool_size,
                });
            }
            if seen[i] {
                return Err(LapRlsError::DuplicateIndex { index: i });
            }
            seen[i] = true;
        }
        Ok(LabeledSet { indices, labels })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// A fitted kernel expansion `f(x) = sum_i alpha_i k(x_i, x)` over the pool
/// points it was trained on.
#[derive(Debug, Clone)]
pub struct LapRlsModel {
    coefficients: Array1<f64>,
    kernel: KernelSpec,
    basis: Arc<Array2<f64>>,
    lambda_a: f64,
    lambda_i: f64,
}

impl LapRlsModel {
    pub fn coefficients(&self) -> ArrayView1<'_, f64> {
        self.coefficients.view()
    }

    pub fn lambda_a(&self) -> f64 {
        self.lambda_a
    }

    pub fn lambda_i(&self) -> f64 {
        self.lambda_i
    }

    /// Evaluates the expansion at an arbitrary ambient point.
    pub fn predict(&self, x: ArrayView1<f64>) -> Result<f64, LapRlsError> {
        if x.len() != self.basis.ncols() {
            return Err(LapRlsError::DimensionMismatch {
                expected: self.basis.ncols(),
                found: x.len(),
            });
        }
        let mut f = 0.0;
        for (i, alpha) in self.coefficients.iter().enumerate() {
            f += alpha * self.kernel.eval(self.basis.row(i), x)?;
        }
        Ok(f)
    }

    /// Evaluates the expansion at every pool point through the precomputed
    /// Gram matrix. The pool must be the one the model was fitted on; the
    /// summation order is fixed so repeated calls are bit-identical.
    pub fn predict_pool(&self, pool: &CandidatePool) -> Result<Array1<f64>, LapRlsError> {
        let n = pool.len();
        if self.coefficients.len() != n {
            return Err(LapRlsError::DimensionMismatch {
                expected: self.coefficients.len(),
                found: n,
            });
        }
        let k = pool.gram().values();
        let mut out = Array1::zeros(n);
        for i in 0..n {
            let mut f = 0.0;
            for (j, alpha) in self.coefficients.iter().enumerate() {
                f += k[(i, j)] * alpha;
            }
            out[i] = f;
        }
        Ok(out)
    }
}

/// Fits the kernel expansion on the labeled subset of a pool.
pub fn fit_coefficients(
    pool: &CandidatePool,
    labeled: &LabeledSet,
    lambda_a: f64,
    lambda_i: f64,
) -> Result<LapRlsModel, LapRlsError> {
    if !(lambda_a > 0.0) {
        return Err(LapRlsError::Design(DesignError::NonPositiveRidge(lambda_a)));
    }
    if !(lambda_i >= 0.0) {
        return Err(LapRlsError::Design(DesignError::NegativeSmoothness(
            lambda_i,
        )));
    }
    let n = pool.len();
    for &i in labeled.indices() {
        if i >= n {
            return Err(LapRlsError::IndexOutOfRange { index: i, n });
        }
    }
    let k = pool.gram().values();

    let mut a = k.mapv(|v| v * lambda_a);
    if lambda_i > 0.0 {
        a.scaled_add(lambda_i, pool.smoothed_gram());
    }
    let mut rhs = Array1::zeros(n);
    for (&idx, &y) in labeled.indices().iter().zip(labeled.labels().iter()) {
        let section = k.row(idx);
        for r in 0..n {
            let w = section[r];
            let mut row = a.row_mut(r);
            for c in 0..n {
                row[c] += w * section[c];
            }
            rhs[r] += w * y;
        }
    }

    let system = SpdMatrix::from_symmetrized(a)?;
    let coefficients = match system.solve(rhs.view()) {
        Ok(alpha) => alpha,
        Err(NumericsError::NotPositiveDefinite { pivot_index }) => {
            return Err(LapRlsError::SingularSystem { pivot_index })
        }
        Err(e) => return Err(LapRlsError::Numerics(e)),
    };
    Ok(LapRlsModel {
        coefficients,
        kernel: pool.kernel().clone(),
        basis: pool.points_shared(),
        lambda_a,
        lambda_i,
    })
}

/// Fits the finite-dimensional analogue directly in feature space:
/// `(Z^T Z + lambda_a I + lambda_i X^T L X) beta = Z^T y` where Z holds the
/// labeled feature rows. With invertible sample covariance this is the same
/// predictor as the kernel expansion under a linear kernel.
pub fn fit_beta_linear(
    features: &FeatureMap,
    laplacian: &LaplacianMatrix,
    labeled: &LabeledSet,
    lambda_a: f64,
    lambda_i: f64,
) -> Result<Array1<f64>, LapRlsError> {
    let n = features.len();
    for &i in labeled.indices() {
        if i >= n {
            return Err(LapRlsError::IndexOutOfRange { index: i, n });
        }
    }
    let regularizer = Regularizer::new(features, laplacian, lambda_a, lambda_i)?;
    let p = features.dim();
    let mut a = regularizer.matrix().entries().clone();
    let mut rhs = Array1::zeros(p);
    for (&idx, &y) in labeled.indices().iter().zip(labeled.labels().iter()) {
        let g = features.matrix().row(idx);
        for i in 0..p {
            let gi = g[i];
            for j in 0..=i {
                a[(i, j)] += gi * g[j];
            }
            rhs[i] += gi * y;
        }
    }
    for i in 0..p {
        for j in 0..i {
            a[(j, i)] = a[(i, j)];
        }
    }
    let system = SpdMatrix::new(a)?;
    Ok(system.solve(rhs.view())?)
}
