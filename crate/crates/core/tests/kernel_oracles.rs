//! Entrywise and structural checks of Gram-matrix assembly.

mod common;

use common::{random_matrix, random_vector, seeded};
use odoem::kernels::{gram, KernelSpec, RbfConvention};

#[test]
fn rbf_entries_match_the_scalar_formula() {
    let mut rng = seeded(201);
    let pts = random_matrix(&mut rng, 12, 3, -2.0, 2.0);
    let range = 0.7;
    let k = gram(&KernelSpec::rbf(range).unwrap(), pts.view(), pts.view()).unwrap();
    for i in 0..12 {
        for j in 0..12 {
            let mut d2 = 0.0;
            for c in 0..3 {
                let d = pts[(i, c)] - pts[(j, c)];
                d2 += d * d;
            }
            let reference = (-d2 / (2.0 * range * range)).exp();
            assert!(
                (k.values()[(i, j)] - reference).abs() <= 1e-15,
                "entry ({i},{j})"
            );
        }
    }
}

#[test]
fn gamma_convention_entries_match() {
    let mut rng = seeded(202);
    let pts = random_matrix(&mut rng, 8, 2, -1.0, 1.0);
    let gamma = 3.0;
    let spec = KernelSpec::rbf_with_convention(gamma, RbfConvention::Gamma).unwrap();
    let k = gram(&spec, pts.view(), pts.view()).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let mut d2 = 0.0;
            for c in 0..2 {
                let d = pts[(i, c)] - pts[(j, c)];
                d2 += d * d;
            }
            let reference = (-gamma * d2).exp();
            assert!((k.values()[(i, j)] - reference).abs() <= 1e-15);
        }
    }
}

#[test]
fn linear_gram_is_the_outer_product_matrix() {
    let mut rng = seeded(203);
    let pts = random_matrix(&mut rng, 10, 4, -3.0, 3.0);
    let k = gram(&KernelSpec::linear(), pts.view(), pts.view()).unwrap();
    let reference = pts.dot(&pts.t());
    for i in 0..10 {
        for j in 0..10 {
            assert!(
                (k.values()[(i, j)] - reference[(i, j)]).abs() <= 1e-12,
                "entry ({i},{j})"
            );
        }
    }
}

#[test]
fn square_gram_is_symmetric_to_the_bit() {
    let mut rng = seeded(204);
    let pts = random_matrix(&mut rng, 15, 3, -2.0, 2.0);
    let k = gram(&KernelSpec::rbf(0.4).unwrap(), pts.view(), pts.view()).unwrap();
    for i in 0..15 {
        for j in 0..15 {
            assert_eq!(
                k.values()[(i, j)].to_bits(),
                k.values()[(j, i)].to_bits(),
                "entry ({i},{j})"
            );
        }
    }
}

#[test]
fn rbf_gram_quadratic_forms_are_nonnegative() {
    let mut rng = seeded(205);
    for trial in 0..10 {
        let pts = random_matrix(&mut rng, 12, 2, -2.0, 2.0);
        let k = gram(&KernelSpec::rbf(0.8).unwrap(), pts.view(), pts.view()).unwrap();
        assert!(k.psd_check(), "trial {trial}");
        for _ in 0..5 {
            let f = random_vector(&mut rng, 12, -1.0, 1.0);
            let mut quad = 0.0;
            for i in 0..12 {
                for j in 0..12 {
                    quad += f[i] * k.values()[(i, j)] * f[j];
                }
            }
            assert!(quad >= -1e-10, "trial {trial}: quadratic form {quad}");
        }
    }
}

#[test]
fn rectangular_gram_has_requested_shape() {
    let mut rng = seeded(206);
    let rows = random_matrix(&mut rng, 6, 3, -1.0, 1.0);
    let cols = random_matrix(&mut rng, 9, 3, -1.0, 1.0);
    let spec = KernelSpec::rbf(1.0).unwrap();
    let k = gram(&spec, rows.view(), cols.view()).unwrap();
    assert_eq!(k.values().nrows(), 6);
    assert_eq!(k.values().ncols(), 9);
    for i in 0..6 {
        for j in 0..9 {
            let reference = spec.eval(rows.row(i), cols.row(j)).unwrap();
            assert_eq!(k.values()[(i, j)].to_bits(), reference.to_bits());
        }
    }
}
