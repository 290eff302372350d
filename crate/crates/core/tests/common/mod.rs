//! Shared test oracles: slow, simple reference implementations that the
//! library's optimized routines are checked against. Everything here avoids
//! the library's own linear algebra on purpose.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> Array2<f64> {
    let mut m = Array2::zeros((rows, cols));
    for v in m.iter_mut() {
        *v = rng.gen_range(lo..hi);
    }
    m
}

pub fn random_vector<R: Rng>(rng: &mut R, len: usize, lo: f64, hi: f64) -> Array1<f64> {
    let mut v = Array1::zeros(len);
    for x in v.iter_mut() {
        *x = rng.gen_range(lo..hi);
    }
    v
}

/// `B B^T + jitter I`, symmetrized entry by entry so the library's symmetry
/// check sees an exact match.
pub fn random_spd<R: Rng>(rng: &mut R, p: usize, jitter: f64) -> Array2<f64> {
    let b = random_matrix(rng, p, p, -1.0, 1.0);
    let mut a = b.dot(&b.t());
    for i in 0..p {
        a[(i, i)] += jitter;
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Strictly positive weights summing to 1.
pub fn random_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

/// Determinant by LU elimination with partial pivoting.
pub fn gauss_det(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        if m[(piv, col)] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                m.swap((col, c), (piv, c));
            }
            det = -det;
        }
        det *= m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            for c in col..n {
                m[(r, c)] -= f * m[(col, c)];
            }
        }
    }
    det
}

/// Dense solve by Gaussian elimination with partial pivoting; `None` when a
/// pivot vanishes.
pub fn gauss_solve(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        if m[(piv, col)] == 0.0 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                m.swap((col, c), (piv, c));
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            for c in col..n {
                m[(r, c)] -= f * m[(col, c)];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for c in col + 1..n {
            s -= m[(col, c)] * x[c];
        }
        x[col] = s / m[(col, col)];
    }
    Some(x)
}

/// Full inverse, column by column through [`gauss_solve`].
pub fn gauss_inverse(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut inv = Array2::zeros((n, n));
    for col in 0..n {
        let mut e = Array1::zeros(n);
        e[col] = 1.0;
        let x = gauss_solve(a, &e)?;
        for row in 0..n {
            inv[(row, col)] = x[row];
        }
    }
    Some(inv)
}

/// Determinant by cofactor expansion along the first row. Exponential cost;
/// keep the dimension at 7 or below.
pub fn det_cofactor(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert!(n <= 7, "cofactor expansion is for small matrices only");
    if n == 1 {
        return a[(0, 0)];
    }
    let mut det = 0.0;
    let mut sign = 1.0;
    for col in 0..n {
        let mut minor = Array2::zeros((n - 1, n - 1));
        for r in 1..n {
            let mut mc = 0;
            for c in 0..n {
                if c == col {
                    continue;
                }
                minor[(r - 1, mc)] = a[(r, c)];
                mc += 1;
            }
        }
        det += sign * a[(0, col)] * det_cofactor(&minor);
        sign = -sign;
    }
    det
}

/// Result of the reference simplex optimizer.
pub struct SimplexSolution {
    pub weights: Vec<f64>,
    pub logdet: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Maximizes `ln det(C + sum_i q_i g_i g_i^T)` over the probability simplex
/// by multiplicative weights on the gradient, with a backtracking rate.
///
/// Entirely self-contained: information assembly, inverses, and determinants
/// all go through the Gaussian-elimination helpers above, so agreement with
/// the library is meaningful evidence rather than an identity check.
pub fn simplex_oracle(
    features: &Array2<f64>,
    penalty: &Array2<f64>,
    tol: f64,
    max_iter: usize,
) -> SimplexSolution {
    let n = features.nrows();
    let p = features.ncols();
    assert_eq!(p, penalty.nrows());
    let mut q = vec![1.0 / n as f64; n];
    let mut eta = 0.5;
    let mut iterations = 0;

    let information = |q: &[f64]| -> Array2<f64> {
        let mut m = penalty.clone();
        for (i, &qi) in q.iter().enumerate() {
            for r in 0..p {
                for c in 0..p {
                    m[(r, c)] += qi * features[(i, r)] * features[(i, c)];
                }
            }
        }
        m
    };

    let mut m = information(&q);
    let mut logdet = gauss_det(&m).ln();
    let mut gap = f64::INFINITY;

    while iterations < max_iter {
        iterations += 1;
        let inv = gauss_inverse(&m).expect("information stays invertible");
        let mut d = vec![0.0; n];
        let mut d_max = f64::NEG_INFINITY;
        for i in 0..n {
            let mut di = 0.0;
            for r in 0..p {
                for c in 0..p {
                    di += features[(i, r)] * inv[(r, c)] * features[(i, c)];
                }
            }
            d[i] = di;
            d_max = d_max.max(di);
        }
        let mut trace_c = 0.0;
        for r in 0..p {
            for c in 0..p {
                trace_c += inv[(r, c)] * penalty[(c, r)];
            }
        }
        gap = d_max - (p as f64 - trace_c);
        if gap <= tol {
            break;
        }

        loop {
            let mut trial: Vec<f64> = q
                .iter()
                .zip(d.iter())
                .map(|(&qi, &di)| qi * (eta * (di - d_max)).exp())
                .collect();
            let total: f64 = trial.iter().sum();
            for v in &mut trial {
                *v /= total;
            }
            let m_trial = information(&trial);
            let logdet_trial = gauss_det(&m_trial).ln();
            if logdet_trial >= logdet - 1e-15 || eta < 1e-12 {
                q = trial;
                m = m_trial;
                logdet = logdet_trial;
                eta *= 1.05;
                break;
            }
            eta *= 0.5;
        }
    }

    SimplexSolution {
        weights: q,
        logdet,
        gap,
        iterations,
    }
}
