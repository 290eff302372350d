//! Mercer kernel evaluation and Gram-matrix assembly.

use ndarray::{Array2, ArrayView1, ArrayView2};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty point list")]
    EmptyInput,
    #[error("RBF range must be positive, got {0}")]
    NonPositiveRange(f64),
}

/// Interpretation of the RBF `range` parameter.
///
/// `LengthScale` is `exp(-‖x-y‖² / (2·range²))`; `Gamma` reads the same
/// number as the exponent coefficient, `exp(-range·‖x-y‖²)`. The two
/// conventions differ enormously for small ranges, so the choice is explicit
/// configuration rather than a guess.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RbfConvention {
    #[default]
    LengthScale,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Rbf {
        range: f64,
        convention: RbfConvention,
    },
    Linear,
}

impl KernelSpec {
    /// RBF kernel in the default length-scale convention.
    pub fn rbf(range: f64) -> Result<Self, KernelError> {
        Self::rbf_with_convention(range, RbfConvention::LengthScale)
    }

    pub fn rbf_with_convention(range: f64, convention: RbfConvention) -> Result<Self, KernelError> {
        if !(range > 0.0) {
            return Err(KernelError::NonPositiveRange(range));
        }
        Ok(KernelSpec::Rbf { range, convention })
    }

    pub fn linear() -> Self {
        KernelSpec::Linear
    }

    /// Evaluates the kernel at a pair of points.
    pub fn eval(&self, x: ArrayView1<f64>, x2: ArrayView1<f64>) -> Result<f64, KernelError> {
        if x.len() != x2.len() {
            return Err(KernelError::DimensionMismatch {
                expected: x.len(),
                found: x2.len(),
            });
        }
        Ok(match *self {
            KernelSpec::Rbf { range, convention } => {
                let d2: f64 = x
                    .iter()
                    .zip(x2.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                match convention {
                    RbfConvention::LengthScale => (-d2 / (2.0 * range * range)).exp(),
                    RbfConvention::Gamma => (-range * d2).exp(),
                }
            }
            KernelSpec::Linear => x.iter().zip(x2.iter()).map(|(a, b)| a * b).sum(),
        })
    }
}

/// Kernel matrix between two point sets, tagged with the source indices.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    values: Array2<f64>,
    row_points: Vec<usize>,
    col_points: Vec<usize>,
}

impl GramMatrix {
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn row_points(&self) -> &[usize] {
        &self.row_points
    }

    pub fn col_points(&self) -> &[usize] {
        &self.col_points
    }

    /// For a square Gram matrix: true when `values + 1e-10·I` factors with
    /// all pivots positive, the working definition of PSD used in tests.
    pub fn psd_check(&self) -> bool {
        if self.values.nrows() != self.values.ncols() {
            return false;
        }
        let mut a = self.values.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += 1e-10;
        }
        crate::numerics::CholeskyFactor::factor(&a).is_ok()
    }
}

/// Assembles the kernel matrix with entry `(i,j) = k(rows[i], cols[j])`.
/// When the two point sets are identical the upper triangle is mirrored from
/// the lower so the result is symmetric to the bit.
pub fn gram(
    spec: &KernelSpec,
    rows: ArrayView2<f64>,
    cols: ArrayView2<f64>,
) -> Result<GramMatrix, KernelError> {
    if rows.nrows() == 0 || cols.nrows() == 0 {
        return Err(KernelError::EmptyInput);
    }
    if rows.ncols() != cols.ncols() {
        return Err(KernelError::DimensionMismatch {
            expected: rows.ncols(),
            found: cols.ncols(),
        });
    }
    let (n, m) = (rows.nrows(), cols.nrows());
    let mut values = Array2::zeros((n, m));
    if n == m && rows == cols {
        for i in 0..n {
            for j in 0..=i {
                let v = spec.eval(rows.row(i), cols.row(j))?;
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
    } else {
        for i in 0..n {
            for j in 0..m {
                values[(i, j)] = spec.eval(rows.row(i), cols.row(j))?;
            }
        }
    }
    Ok(GramMatrix {
        values,
        row_points: (0..n).collect(),
        col_points: (0..m).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2, Array2};

    #[test]
    fn rbf_at_zero_distance_is_one() {
        let k = KernelSpec::rbf(0.01).unwrap();
        let x = arr1(&[1.0, 2.0]);
        assert_eq!(k.eval(x.view(), x.view()).unwrap(), 1.0);
    }

    #[test]
    fn linear_is_dot_product() {
        let k = KernelSpec::linear();
        let v = k
            .eval(arr1(&[1.0, 2.0]).view(), arr1(&[3.0, 4.0]).view())
            .unwrap();
        assert_eq!(v, 11.0);
    }

    #[test]
    fn rbf_one_range_apart() {
        let k = KernelSpec::rbf(0.01).unwrap();
        let v = k.eval(arr1(&[0.0]).view(), arr1(&[0.01]).view()).unwrap();
        assert!((v - (-0.5_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn gamma_convention_reads_range_as_coefficient() {
        let k = KernelSpec::rbf_with_convention(0.01, RbfConvention::Gamma).unwrap();
        let v = k.eval(arr1(&[0.0]).view(), arr1(&[2.0]).view()).unwrap();
        assert!((v - (-0.04_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let k = KernelSpec::linear();
        let err = k
            .eval(arr1(&[1.0]).view(), arr1(&[1.0, 2.0]).view())
            .unwrap_err();
        assert_eq!(
            err,
            KernelError::DimensionMismatch {
                expected: 1,
                found: 2
            }
        );
    }

    #[test]
    fn nonpositive_range_rejected() {
        assert!(matches!(
            KernelSpec::rbf(0.0),
            Err(KernelError::NonPositiveRange(_))
        ));
    }

    #[test]
    fn gram_single_point() {
        let k = KernelSpec::rbf(1.0).unwrap();
        let p = arr2(&[[0.3, 0.7]]);
        let g = gram(&k, p.view(), p.view()).unwrap();
        assert_eq!(g.values(), &arr2(&[[1.0]]));
    }

    #[test]
    fn gram_identical_points_all_ones() {
        let k = KernelSpec::rbf(0.5).unwrap();
        let p = arr2(&[[1.0, 1.0], [1.0, 1.0]]);
        let g = gram(&k, p.view(), p.view()).unwrap();
        assert_eq!(g.values(), &arr2(&[[1.0, 1.0], [1.0, 1.0]]));
    }

    #[test]
    fn gram_matches_entrywise_loop() {
        let k = KernelSpec::rbf(0.8).unwrap();
        let p = arr2(&[[0.1, -0.4], [1.2, 0.3], [-0.5, 0.9]]);
        let g = gram(&k, p.view(), p.view()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = k.eval(p.row(i), p.row(j)).unwrap();
                assert!((g.values()[(i, j)] - want).abs() < 1e-15);
            }
        }
        assert!(g.psd_check());
    }

    #[test]
    fn square_gram_is_exactly_symmetric() {
        let k = KernelSpec::rbf(0.3).unwrap();
        let p = arr2(&[[0.0, 0.0], [0.31, 0.0], [0.1, 0.72], [0.9, 0.4]]);
        let g = gram(&k, p.view(), p.view()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.values()[(i, j)], g.values()[(j, i)]);
            }
        }
    }

    #[test]
    fn rectangular_gram_transposes() {
        let k = KernelSpec::rbf(0.6).unwrap();
        let s = arr2(&[[0.0, 1.0], [2.0, 0.5]]);
        let t = arr2(&[[1.0, 1.0], [0.2, 0.8], [2.0, 2.0]]);
        let a = gram(&k, s.view(), t.view()).unwrap();
        let b = gram(&k, t.view(), s.view()).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(a.values()[(i, j)], b.values()[(j, i)]);
            }
        }
    }

    #[test]
    fn empty_input_rejected() {
        let k = KernelSpec::linear();
        let empty = Array2::<f64>::zeros((0, 2));
        let p = arr2(&[[1.0, 2.0]]);
        assert_eq!(
            gram(&k, empty.view(), p.view()).unwrap_err(),
            KernelError::EmptyInput
        );
    }
}
