//! Equivalence checks of the model fits: the kernel expansion against a
//! direct ridge solve, and the kernel route against the feature-space route
//! on linear kernels.

mod common;

use common::{gauss_solve, random_matrix, seeded};
use ndarray::{Array1, Array2};
use odoem::design::FeatureMap;
use odoem::graph::{knn_graph, laplacian, EdgeWeight};
use odoem::kernels::KernelSpec;
use odoem::laprls::{fit_beta_linear, fit_coefficients, LabeledSet};
use odoem::pool::CandidatePool;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_pool(rng: &mut impl Rng, n: usize, d: usize, kernel: KernelSpec) -> CandidatePool {
    let pts = random_matrix(rng, n, d, -2.0, 2.0);
    CandidatePool::build(pts, kernel, 3.min(n - 1), EdgeWeight::Binary).unwrap()
}

fn random_labeled(rng: &mut impl Rng, n: usize, m: usize) -> LabeledSet {
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    indices.truncate(m);
    let labels: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
    LabeledSet::new(indices, labels, n).unwrap()
}

#[test]
fn zero_smoothing_fit_matches_a_direct_ridge_solve() {
    let mut rng = seeded(501);
    for trial in 0..10 {
        let n = rng.gen_range(5..12);
        let m = rng.gen_range(2..=n);
        let pool = random_pool(&mut rng, n, 3, KernelSpec::rbf(0.9).unwrap());
        let labeled = random_labeled(&mut rng, n, m);
        let lambda_a = 0.05;

        let model = fit_coefficients(&pool, &labeled, lambda_a, 0.0).unwrap();

        // Reference: solve (K_SS + lambda_a I) c = y on the labeled block and
        // zero-pad; that vector solves the full normal equations exactly.
        let k = pool.gram().values();
        let mut block = Array2::zeros((m, m));
        for (r, &i) in labeled.indices().iter().enumerate() {
            for (c, &j) in labeled.indices().iter().enumerate() {
                block[(r, c)] = k[(i, j)];
            }
            block[(r, r)] += lambda_a;
        }
        let y = Array1::from(labeled.labels().to_vec());
        let c = gauss_solve(&block, &y).unwrap();
        let mut reference = Array1::zeros(n);
        for (r, &i) in labeled.indices().iter().enumerate() {
            reference[i] = c[r];
        }

        for i in 0..n {
            assert!(
                (model.coefficients()[i] - reference[i]).abs() <= 1e-8,
                "trial {trial}, coefficient {i}: {} vs {}",
                model.coefficients()[i],
                reference[i]
            );
        }
    }
}

#[test]
fn kernel_and_feature_routes_agree_on_linear_kernels() {
    // the kernel-route system is full rank only when the linear Gram X X^T
    // is, which needs at least as many coordinates as points
    let mut rng = seeded(502);
    for trial in 0..10 {
        let n = rng.gen_range(4..8);
        let d = n + rng.gen_range(0..3);
        let m = rng.gen_range(2..=n);
        let pts = random_matrix(&mut rng, n, d, -2.0, 2.0);
        let graph = knn_graph(pts.view(), 3.min(n - 1), EdgeWeight::Binary).unwrap();
        let lap = laplacian(&graph);
        let pool = CandidatePool::with_graph(pts.clone(), KernelSpec::linear(), &graph).unwrap();
        let features = FeatureMap::explicit(pts.view()).unwrap();
        let labeled = random_labeled(&mut rng, n, m);
        let (lambda_a, lambda_i) = (0.08, 0.3);

        let model = fit_coefficients(&pool, &labeled, lambda_a, lambda_i).unwrap();
        let beta = fit_beta_linear(&features, &lap, &labeled, lambda_a, lambda_i).unwrap();

        let kernel_route = model.predict_pool(&pool).unwrap();
        for i in 0..n {
            let mut feature_route = 0.0;
            for c in 0..d {
                feature_route += pts[(i, c)] * beta[c];
            }
            let scale = feature_route.abs().max(1.0);
            assert!(
                (kernel_route[i] - feature_route).abs() <= 1e-7 * scale,
                "trial {trial}, point {i}: kernel {} vs feature {}",
                kernel_route[i],
                feature_route
            );
        }
    }
}

#[test]
fn huge_ridge_shrinks_the_linear_fit_toward_zero() {
    let mut rng = seeded(503);
    let n = 10;
    let d = 3;
    let pts = random_matrix(&mut rng, n, d, -2.0, 2.0);
    let graph = knn_graph(pts.view(), 3, EdgeWeight::Binary).unwrap();
    let lap = laplacian(&graph);
    let features = FeatureMap::explicit(pts.view()).unwrap();
    let labeled = random_labeled(&mut rng, n, 6);

    let beta = fit_beta_linear(&features, &lap, &labeled, 1e6, 0.0).unwrap();

    let mut zty = Array1::<f64>::zeros(d);
    for (&i, &y) in labeled.indices().iter().zip(labeled.labels().iter()) {
        for c in 0..d {
            zty[c] += pts[(i, c)] * y;
        }
    }
    let beta_norm = beta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let zty_norm = zty.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(
        beta_norm <= 1e-4 * zty_norm,
        "beta norm {beta_norm} vs data term norm {zty_norm}"
    );
}

#[test]
fn smoothing_pulls_neighbors_together() {
    let mut rng = seeded(504);
    let pts = random_matrix(&mut rng, 8, 2, -1.0, 1.0);
    let graph = knn_graph(pts.view(), 2, EdgeWeight::Binary).unwrap();
    let pool = CandidatePool::with_graph(pts, KernelSpec::rbf(0.6).unwrap(), &graph).unwrap();
    let labeled = random_labeled(&mut rng, 8, 4);

    let rough = fit_coefficients(&pool, &labeled, 0.05, 0.0).unwrap();
    let smooth = fit_coefficients(&pool, &labeled, 0.05, 5.0).unwrap();
    let lap = pool.laplacian();
    let rough_penalty = lap.quadratic_form(rough.predict_pool(&pool).unwrap().view());
    let smooth_penalty = lap.quadratic_form(smooth.predict_pool(&pool).unwrap().view());
    assert!(
        smooth_penalty <= rough_penalty + 1e-12,
        "smoothness penalty rose from {rough_penalty} to {smooth_penalty}"
    );
}

#[test]
fn predictions_at_pool_points_match_the_expansion() {
    let mut rng = seeded(505);
    let pts = random_matrix(&mut rng, 7, 2, -1.5, 1.5);
    let pool = CandidatePool::build(
        pts.clone(),
        KernelSpec::rbf(0.8).unwrap(),
        2,
        EdgeWeight::Binary,
    )
    .unwrap();
    let labeled = random_labeled(&mut rng, 7, 3);
    let model = fit_coefficients(&pool, &labeled, 0.05, 0.2).unwrap();

    let through_gram = model.predict_pool(&pool).unwrap();
    for i in 0..7 {
        let direct = model.predict(pts.row(i)).unwrap();
        assert!(
            (through_gram[i] - direct).abs() <= 1e-10,
            "point {i}: {} vs {}",
            through_gram[i],
            direct
        );
    }
}

#[test]
fn labeled_set_rejects_bad_input() {
    assert!(LabeledSet::new(vec![], vec![], 5).is_err());
    assert!(LabeledSet::new(vec![0, 0], vec![1.0, 2.0], 5).is_err());
    assert!(LabeledSet::new(vec![9], vec![1.0], 5).is_err());
    assert!(LabeledSet::new(vec![0], vec![1.0, 2.0], 5).is_err());
}
