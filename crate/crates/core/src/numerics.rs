//! Dense symmetric positive definite linear algebra.
//!
//! Everything here goes through one unpivoted triangular factorization
//! (`A = L Lᵀ`). SPD is guaranteed structurally by the callers: every
//! information matrix contains a `λ_A·I` term with `λ_A > 0`, so a failed
//! factorization is reported as an error instead of being patched with
//! jitter. All reductions run left to right in index order so repeated runs
//! are bit-identical.

use ndarray::{Array1, Array2, ArrayView1};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not positive definite (pivot {pivot_index} is not strictly positive)")]
    NotPositiveDefinite { pivot_index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric (max |a_ij - a_ji| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
}

/// Relative tolerance for the symmetry check in [`SpdMatrix::new`].
const SYMMETRY_RTOL: f64 = 1e-12;

/// Lower-triangular factor of an SPD matrix, `A = L Lᵀ`.
///
/// Stores `L` row-major and its transpose alongside, so both forward and
/// backward substitution walk contiguous memory.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    l: Vec<f64>,
    lt: Vec<f64>,
}

impl CholeskyFactor {
    /// Factors a square matrix assumed symmetric; only the lower triangle is
    /// read. Fails with the index of the first nonpositive pivot.
    pub fn factor(a: &Array2<f64>) -> Result<Self, NumericsError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(NumericsError::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        let mut l = vec![0.0_f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let dot: f64 = {
                    let ri = &l[i * n..i * n + j];
                    let rj = &l[j * n..j * n + j];
                    ri.iter().zip(rj).map(|(x, y)| x * y).sum()
                };
                let v = a[(i, j)] - dot;
                if i == j {
                    if v <= 0.0 || !v.is_finite() {
                        return Err(NumericsError::NotPositiveDefinite { pivot_index: i });
                    }
                    l[i * n + i] = v.sqrt();
                } else {
                    l[i * n + j] = v / l[j * n + j];
                }
            }
        }
        let mut lt = vec![0.0_f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                lt[j * n + i] = l[i * n + j];
            }
        }
        Ok(CholeskyFactor { n, l, lt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The factor as a dense lower-triangular matrix.
    pub fn lower(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.n, self.n), self.l.clone()).expect("square buffer")
    }

    /// `log det A`, the sum of the logs of the squared pivots.
    pub fn logdet(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let d = self.l[i * self.n + i];
            acc += (d * d).ln();
        }
        acc
    }

    /// Solves `L y = b` (forward substitution).
    pub fn forward(&self, b: ArrayView1<f64>) -> Array1<f64> {
        debug_assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y = Array1::zeros(n);
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let dot: f64 = row.iter().zip(y.iter()).map(|(x, z)| x * z).sum();
            y[i] = (b[i] - dot) / self.l[i * n + i];
        }
        y
    }

    /// Solves `Lᵀ x = y` (backward substitution).
    fn backward(&self, mut y: Array1<f64>) -> Array1<f64> {
        let n = self.n;
        for i in (0..n).rev() {
            let row = &self.lt[i * n + i + 1..(i + 1) * n];
            let tail = y.as_slice().expect("contiguous")[i + 1..].to_vec();
            let dot: f64 = row.iter().zip(tail.iter()).map(|(x, z)| x * z).sum();
            y[i] = (y[i] - dot) / self.lt[i * n + i];
        }
        y
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: ArrayView1<f64>) -> Array1<f64> {
        self.backward(self.forward(b))
    }

    /// The quadratic form `gᵀ A⁻¹ g`, computed as `‖L⁻¹g‖²` so the result is
    /// nonnegative by construction.
    pub fn quad_inverse(&self, g: ArrayView1<f64>) -> f64 {
        let y = self.forward(g);
        y.iter().map(|v| v * v).sum()
    }

    /// `tr(A⁻¹ C)` via one solve per column of `C`.
    pub fn inv_trace_product(&self, c: &Array2<f64>) -> f64 {
        debug_assert_eq!(c.nrows(), self.n);
        debug_assert_eq!(c.ncols(), self.n);
        let mut acc = 0.0;
        for j in 0..self.n {
            let x = self.solve(c.column(j));
            acc += x[j];
        }
        acc
    }
}

/// A symmetric positive definite matrix with a lazily cached triangular
/// factor. Immutable after construction; safe to share across threads.
#[derive(Debug)]
pub struct SpdMatrix {
    entries: Array2<f64>,
    factor: OnceLock<Result<CholeskyFactor, NumericsError>>,
}

impl Clone for SpdMatrix {
    fn clone(&self) -> Self {
        SpdMatrix {
            entries: self.entries.clone(),
            factor: OnceLock::new(),
        }
    }
}

impl SpdMatrix {
    /// Wraps a square matrix, requiring symmetry to within a `1e-12`
    /// relative tolerance. Positive definiteness is checked lazily, at the
    /// first operation that needs the factor.
    pub fn new(entries: Array2<f64>) -> Result<Self, NumericsError> {
        if entries.nrows() != entries.ncols() {
            return Err(NumericsError::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let mut max_abs = 0.0_f64;
        let mut max_asym = 0.0_f64;
        for i in 0..entries.nrows() {
            for j in 0..=i {
                max_abs = max_abs
                    .max(entries[(i, j)].abs())
                    .max(entries[(j, i)].abs());
                max_asym = max_asym.max((entries[(i, j)] - entries[(j, i)]).abs());
            }
        }
        if max_asym > SYMMETRY_RTOL * max_abs {
            return Err(NumericsError::NotSymmetric {
                max_asymmetry: max_asym,
            });
        }
        Ok(SpdMatrix {
            entries,
            factor: OnceLock::new(),
        })
    }

    /// Builds from `(A + Aᵀ)/2`, for callers that assemble the matrix from
    /// products that are symmetric only up to roundoff.
    pub fn from_symmetrized(a: Array2<f64>) -> Result<Self, NumericsError> {
        if a.nrows() != a.ncols() {
            return Err(NumericsError::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let mut s = a;
        for i in 0..s.nrows() {
            for j in 0..i {
                let m = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = m;
                s[(j, i)] = m;
            }
        }
        Ok(SpdMatrix {
            entries: s,
            factor: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    /// The cached triangular factor, computed on first use.
    pub fn cholesky(&self) -> Result<&CholeskyFactor, NumericsError> {
        self.factor
            .get_or_init(|| CholeskyFactor::factor(&self.entries))
            .as_ref()
            .map_err(|e| e.clone())
    }

    pub fn logdet(&self) -> Result<f64, NumericsError> {
        Ok(self.cholesky()?.logdet())
    }

    /// Solves `A x = b` with `‖Ax − b‖₂ ≤ 1e-8 ‖b‖₂` for well-conditioned `A`.
    pub fn solve(&self, b: ArrayView1<f64>) -> Result<Array1<f64>, NumericsError> {
        if b.len() != self.dim() {
            return Err(NumericsError::DimensionMismatch {
                expected: self.dim(),
                found: b.len(),
            });
        }
        Ok(self.cholesky()?.solve(b))
    }

    /// `det(A + ggᵀ) / det(A) = 1 + gᵀA⁻¹g`; always ≥ 1.
    pub fn rank_one_det_ratio(&self, g: ArrayView1<f64>) -> Result<f64, NumericsError> {
        if g.len() != self.dim() {
            return Err(NumericsError::DimensionMismatch {
                expected: self.dim(),
                found: g.len(),
            });
        }
        Ok(1.0 + self.cholesky()?.quad_inverse(g))
    }
}
