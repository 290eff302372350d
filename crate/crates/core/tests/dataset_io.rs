//! Generation and file-format checks: surface geometry, noise budgets, and
//! CSV round trips through real temporary files.

mod common;

use odoem::datasets::{
    generate, generate_rotating_images, load_images, parametrize, read_manifold_csv, response,
    write_image_csv, write_manifold_csv, DatasetError, ManifoldKind, ParamLayout, IMAGE_PIXELS,
};
use std::f64::consts::PI;
use std::io::Write as _;

#[test]
fn torus_origin_sits_on_the_outer_equator() {
    let data = generate(ManifoldKind::Torus, 400, 0.0, 1, ParamLayout::Grid).unwrap();
    assert!((data.points[(0, 0)] - 3.0).abs() <= 1e-12);
    assert!(data.points[(0, 1)].abs() <= 1e-12);
    assert!(data.points[(0, 2)].abs() <= 1e-12);
    assert!((data.labels[0] - 1.0).abs() <= 1e-12);
}

#[test]
fn response_hand_values() {
    assert!((response(0.0, 0.0) - 1.0).abs() <= 1e-15);
    assert!((response(PI / 2.0, 0.0) - 3.0).abs() <= 1e-15);
}

#[test]
fn response_range_and_minimum_over_a_fine_grid() {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for i in 0..700 {
        for j in 0..700 {
            let u = i as f64 / 700.0 * 2.0 * PI;
            let v = j as f64 / 700.0 * 2.0 * PI;
            let y = response(u, v);
            min = min.min(y);
            max = max.max(y);
        }
    }
    assert!((min + 0.25).abs() <= 1e-4, "grid minimum {min}");
    assert!(
        max <= 3.0 + 1e-12 && max >= 3.0 - 1e-4,
        "grid maximum {max}"
    );
}

#[test]
fn response_is_periodic_in_both_angles() {
    let mut rng = common::seeded(701);
    use rand::Rng;
    for _ in 0..50 {
        let u = rng.gen_range(0.0..2.0 * PI);
        let v = rng.gen_range(0.0..2.0 * PI);
        assert!((response(u, v) - response(u + 2.0 * PI, v)).abs() <= 1e-12);
        assert!((response(u, v) - response(u, v - 2.0 * PI)).abs() <= 1e-12);
    }
}

#[test]
fn noise_free_torus_points_satisfy_the_implicit_surface() {
    let data = generate(ManifoldKind::Torus, 400, 0.0, 3, ParamLayout::Grid).unwrap();
    for row in 0..data.len() {
        let (x, y, z) = (
            data.points[(row, 0)],
            data.points[(row, 1)],
            data.points[(row, 2)],
        );
        let radial = (x * x + y * y).sqrt() - 2.0;
        let residual = radial * radial + z * z - 1.0;
        assert!(residual.abs() <= 1e-10, "row {row}: residual {residual}");
    }
}

#[test]
fn every_kind_parametrizes_without_overlap_at_origin() {
    for kind in [
        ManifoldKind::Torus,
        ManifoldKind::MobiusStrip,
        ManifoldKind::KleinFigure8,
        ManifoldKind::KleinBottle,
    ] {
        let p = parametrize(kind, 0.0, 0.0);
        assert!(p.iter().all(|v| v.is_finite()), "{kind:?} at the origin");
        let data = generate(kind, 100, 0.0, 5, ParamLayout::Grid).unwrap();
        assert_eq!(data.len(), 100);
        assert!(data.points.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn noise_displacement_matches_its_variance_budget() {
    let variance = 0.03_f64;
    let clean = generate(ManifoldKind::Torus, 400, 0.0, 11, ParamLayout::Grid).unwrap();
    let noisy = generate(
        ManifoldKind::Torus,
        400,
        variance.sqrt(),
        11,
        ParamLayout::Grid,
    )
    .unwrap();
    let mut total = 0.0;
    for row in 0..400 {
        for c in 0..3 {
            let d = noisy.points[(row, c)] - clean.points[(row, c)];
            total += d * d;
        }
    }
    let mean_squared_displacement = total / 400.0;
    let expected = 3.0 * variance;
    assert!(
        (mean_squared_displacement - expected).abs() <= 0.2 * expected,
        "displacement {mean_squared_displacement} vs budget {expected}"
    );
}

#[test]
fn generation_is_reproducible_per_seed() {
    let a = generate(
        ManifoldKind::KleinBottle,
        64,
        0.1,
        9,
        ParamLayout::RandomUniform,
    )
    .unwrap();
    let b = generate(
        ManifoldKind::KleinBottle,
        64,
        0.1,
        9,
        ParamLayout::RandomUniform,
    )
    .unwrap();
    assert_eq!(a.points, b.points);
    assert_eq!(a.labels, b.labels);
    let c = generate(
        ManifoldKind::KleinBottle,
        64,
        0.1,
        10,
        ParamLayout::RandomUniform,
    )
    .unwrap();
    assert_ne!(a.points, c.points);
}

#[test]
fn non_square_grid_count_is_rejected() {
    assert!(matches!(
        generate(ManifoldKind::Torus, 401, 0.0, 1, ParamLayout::Grid).unwrap_err(),
        DatasetError::NotPerfectSquare { n: 401 }
    ));
}

#[test]
fn manifold_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.csv");
    let data = generate(ManifoldKind::Torus, 25, 0.2, 7, ParamLayout::Grid).unwrap();
    write_manifold_csv(&data, &path).unwrap();
    let back = read_manifold_csv(&path).unwrap();
    assert_eq!(back.kind, data.kind);
    assert_eq!(back.len(), data.len());
    for row in 0..data.len() {
        for c in 0..3 {
            assert_eq!(back.points[(row, c)], data.points[(row, c)], "row {row}");
        }
        assert_eq!(back.params[(row, 0)], data.params[(row, 0)]);
        assert_eq!(back.params[(row, 1)], data.params[(row, 1)]);
        assert_eq!(back.labels[row], data.labels[row]);
    }
    assert_eq!(back.noise_sd, data.noise_sd);
}

#[test]
fn manifold_csv_requires_the_kind_comment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("anonymous.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "x1,x2,x3,u,v,y").unwrap();
    writeln!(file, "3.0,0.0,0.0,0.0,0.0,1.0").unwrap();
    drop(file);
    assert!(matches!(
        read_manifold_csv(&path).unwrap_err(),
        DatasetError::MissingKind
    ));
}

#[test]
fn image_csv_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("images.csv");
    let data = generate_rotating_images(72);
    assert_eq!(data.len(), 72);
    write_image_csv(&data, &path).unwrap();
    let back = load_images(&path).unwrap();
    assert_eq!(back.len(), 72);
    for (i, angle) in back.angles.iter().enumerate() {
        assert_eq!(*angle, 5.0 * i as f64, "image {i}");
    }
    for i in 0..72 {
        for px in 0..IMAGE_PIXELS {
            assert_eq!(back.vectors[(i, px)], data.vectors[(i, px)]);
        }
    }
}

#[test]
fn image_rows_are_sorted_by_angle_on_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shuffled.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    let pixels = vec!["0.5"; IMAGE_PIXELS].join(",");
    for angle in [90.0, 10.0, 240.0] {
        writeln!(file, "{pixels},{angle}").unwrap();
    }
    drop(file);
    let data = load_images(&path).unwrap();
    assert_eq!(data.angles, vec![10.0, 90.0, 240.0]);
}

#[test]
fn image_rows_with_wrong_field_count_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "{}", vec!["0.5"; 1024].join(",")).unwrap();
    drop(file);
    match load_images(&path).unwrap_err() {
        DatasetError::ParseError { row, .. } => assert_eq!(row, 1),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn image_angle_out_of_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("angle.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "{},400.0", vec!["0.5"; IMAGE_PIXELS].join(",")).unwrap();
    drop(file);
    assert!(matches!(
        load_images(&path).unwrap_err(),
        DatasetError::AngleOutOfRange { row: 1, .. }
    ));
}

#[test]
fn empty_image_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    std::fs::File::create(&path).unwrap();
    assert!(matches!(
        load_images(&path).unwrap_err(),
        DatasetError::ParseError { .. }
    ));
}

#[test]
fn generated_images_stay_inside_the_pixel_range() {
    let data = generate_rotating_images(16);
    for v in data.vectors.iter() {
        assert!((0.0..=1.0).contains(v));
    }
    // rotation moves mass around, so frames must differ
    let first = data.vectors.row(0);
    let quarter = data.vectors.row(4);
    let diff: f64 = first
        .iter()
        .zip(quarter.iter())
        .map(|(a, b)| (a - b).abs())
        .sum();
    assert!(diff > 1.0, "frames 0 and 4 nearly identical ({diff})");
}
