//! Synthetic benchmark datasets: classic two-parameter surfaces embedded in
//! three dimensions with a smooth response on the parameter angles, plus a
//! procedurally generated rotating-pattern image set for pose regression.
//!
//! Coordinates may carry additive Gaussian noise; responses never do. The
//! response is computed at the noise-free parameters, so noise perturbs only
//! the geometry a selection strategy sees, not the ground truth it is scored
//! against.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("n = {n} is not a perfect square; the parameter grid needs one")]
    NotPerfectSquare { n: usize },
    #[error("noise standard deviation must be nonnegative, got {0}")]
    NegativeNoise(f64),
    #[error("unknown manifold kind {name:?}; valid kinds: {valid}")]
    UnknownKind { name: String, valid: &'static str },
    #[error("row {row}: {reason}")]
    ParseError { row: usize, reason: String },
    #[error("row {row}: angle {angle} outside [0, 360)")]
    AngleOutOfRange { row: usize, angle: f64 },
    #[error("missing `# kind = ...` comment line")]
    MissingKind,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

const KIND_NAMES: &str = "torus, mobius, klein-figure8, klein-bottle";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldKind {
    Torus,
    MobiusStrip,
    KleinFigure8,
    KleinBottle,
}

impl ManifoldKind {
    pub fn from_name(name: &str) -> Result<Self, DatasetError> {
        match name {
            "torus" => Ok(ManifoldKind::Torus),
            "mobius" => Ok(ManifoldKind::MobiusStrip),
            "klein-figure8" => Ok(ManifoldKind::KleinFigure8),
            "klein-bottle" => Ok(ManifoldKind::KleinBottle),
            _ => Err(DatasetError::UnknownKind {
                name: name.to_string(),
                valid: KIND_NAMES,
            }),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ManifoldKind::Torus => "torus",
            ManifoldKind::MobiusStrip => "mobius",
            ManifoldKind::KleinFigure8 => "klein-figure8",
            ManifoldKind::KleinBottle => "klein-bottle",
        }
    }

    /// Per-coordinate noise variance used by the stock benchmarks.
    pub fn default_noise_variance(&self) -> f64 {
        match self {
            ManifoldKind::Torus => 0.03,
            ManifoldKind::MobiusStrip => 0.05,
            ManifoldKind::KleinFigure8 => 0.2,
            ManifoldKind::KleinBottle => 0.06,
        }
    }
}

/// How parameter pairs are laid out over [0, 2pi)^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParamLayout {
    /// Uniform sqrt(n) x sqrt(n) grid; requires n to be a perfect square.
    #[default]
    Grid,
    /// Independent uniform draws.
    RandomUniform,
}

#[derive(Debug, Clone)]
pub struct ManifoldDataset {
    pub kind: ManifoldKind,
    /// n x 3 ambient coordinates (noisy when noise_sd > 0).
    pub points: Array2<f64>,
    /// n x 2 noise-free parameter pairs (u, v).
    pub params: Array2<f64>,
    /// Response at the noise-free parameters.
    pub labels: Array1<f64>,
    pub noise_sd: f64,
}

impl ManifoldDataset {
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }
}

/// The benchmark response `sin(u) + sin^2(u) + cos^2(v)`; range [-1/4, 3].
pub fn response(u: f64, v: f64) -> f64 {
    u.sin() + u.sin() * u.sin() + v.cos() * v.cos()
}

/// Embeds a parameter pair on the chosen surface.
///
/// Torus: `((2 + cos v) cos u, (2 + cos v) sin u, sin v)`.
///
/// Strip with a half twist: width parameter `w = v/pi - 1` in [-1, 1), then
/// `((1 + (w/2) cos(u/2)) cos u, (1 + (w/2) cos(u/2)) sin u, (w/2) sin(u/2))`.
///
/// Figure-8 immersion of the non-orientable closed surface, ring radius 2:
/// `x = (2 + cos(u/2) sin v - sin(u/2) sin 2v) cos u` (y likewise with sin u),
/// `z = sin(u/2) sin v + cos(u/2) sin 2v`.
///
/// Bottle-shaped immersion: the standard degree-9 trigonometric polynomial
/// form with denominator 15, traversed with half-angle `u/2` so the full
/// parameter range [0, 2pi) covers the surface once.
pub fn parametrize(kind: ManifoldKind, u: f64, v: f64) -> [f64; 3] {
    match kind {
        ManifoldKind::Torus => {
            let ring = 2.0 + v.cos();
            [ring * u.cos(), ring * u.sin(), v.sin()]
        }
        ManifoldKind::MobiusStrip => {
            let w = v / PI - 1.0;
            let ring = 1.0 + 0.5 * w * (0.5 * u).cos();
            [ring * u.cos(), ring * u.sin(), 0.5 * w * (0.5 * u).sin()]
        }
        ManifoldKind::KleinFigure8 => {
            let ring = 2.0 + (0.5 * u).cos() * v.sin() - (0.5 * u).sin() * (2.0 * v).sin();
            [
                ring * u.cos(),
                ring * u.sin(),
                (0.5 * u).sin() * v.sin() + (0.5 * u).cos() * (2.0 * v).sin(),
            ]
        }
        ManifoldKind::KleinBottle => {
            let h = 0.5 * u;
            let (ch, sh) = (h.cos(), h.sin());
            let cv = v.cos();
            let x = -2.0 / 15.0
                * ch
                * (3.0 * cv - 30.0 * sh + 90.0 * ch.powi(4) * sh - 60.0 * ch.powi(6) * sh
                    + 5.0 * ch * cv * sh);
            let y = -1.0 / 15.0
                * sh
                * (3.0 * cv - 3.0 * ch.powi(2) * cv - 48.0 * ch.powi(4) * cv
                    + 48.0 * ch.powi(6) * cv
                    - 60.0 * sh
                    + 5.0 * ch * cv * sh
                    - 5.0 * ch.powi(3) * cv * sh
                    - 80.0 * ch.powi(5) * cv * sh
                    + 80.0 * ch.powi(7) * cv * sh);
            let z = 2.0 / 15.0 * (3.0 + 5.0 * ch * sh) * v.sin();
            [x, y, z]
        }
    }
}

/// Generates a manifold dataset: parameters laid out per `layout`, ambient
/// coordinates from the surface plus i.i.d. Gaussian noise per coordinate,
/// labels from the noise-free parameters.
pub fn generate(
    kind: ManifoldKind,
    n: usize,
    noise_sd: f64,
    seed: u64,
    layout: ParamLayout,
) -> Result<ManifoldDataset, DatasetError> {
    if !(noise_sd >= 0.0) {
        return Err(DatasetError::NegativeNoise(noise_sd));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Array2::zeros((n, 2));
    match layout {
        ParamLayout::Grid => {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(DatasetError::NotPerfectSquare { n });
            }
            let step = 2.0 * PI / side as f64;
            for i in 0..side {
                for j in 0..side {
                    let row = i * side + j;
                    params[(row, 0)] = i as f64 * step;
                    params[(row, 1)] = j as f64 * step;
                }
            }
        }
        ParamLayout::RandomUniform => {
            for row in 0..n {
                params[(row, 0)] = rng.gen::<f64>() * 2.0 * PI;
                params[(row, 1)] = rng.gen::<f64>() * 2.0 * PI;
            }
        }
    }

    let mut points = Array2::zeros((n, 3));
    let mut labels = Array1::zeros(n);
    let noise = if noise_sd > 0.0 {
        Some(Normal::new(0.0, noise_sd).expect("validated sd"))
    } else {
        None
    };
    for row in 0..n {
        let (u, v) = (params[(row, 0)], params[(row, 1)]);
        let xyz = parametrize(kind, u, v);
        for (c, &x) in xyz.iter().enumerate() {
            let bump = noise.as_ref().map_or(0.0, |d| d.sample(&mut rng));
            points[(row, c)] = x + bump;
        }
        labels[row] = response(u, v);
    }
    Ok(ManifoldDataset {
        kind,
        points,
        params,
        labels,
        noise_sd,
    })
}

/// Writes the dataset as CSV: provenance comments, then a header
/// `x1,x2,x3,u,v,y`, then one row per point.
pub fn write_manifold_csv(dataset: &ManifoldDataset, path: &Path) -> Result<(), DatasetError> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "# kind = {}", dataset.kind.label())?;
    writeln!(file, "# noise_sd = {}", dataset.noise_sd)?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(["x1", "x2", "x3", "u", "v", "y"])?;
    for row in 0..dataset.len() {
        let mut record = Vec::with_capacity(6);
        for c in 0..3 {
            record.push(dataset.points[(row, c)].to_string());
        }
        record.push(dataset.params[(row, 0)].to_string());
        record.push(dataset.params[(row, 1)].to_string());
        record.push(dataset.labels[row].to_string());
        writer.write_record(&record)?;
    }
    writer.flush().map_err(std::io::Error::from)?;
    Ok(())
}

/// Reads a dataset written by `write_manifold_csv`. The `# kind = ...`
/// comment is required; `# noise_sd = ...` is optional metadata.
pub fn read_manifold_csv(path: &Path) -> Result<ManifoldDataset, DatasetError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let mut kind = None;
    let mut noise_sd = 0.0;
    for line in text.lines() {
        let Some(comment) = line.strip_prefix('#') else {
            continue;
        };
        if let Some((key, value)) = comment.split_once('=') {
            match key.trim() {
                "kind" => kind = Some(ManifoldKind::from_name(value.trim())?),
                "noise_sd" => {
                    noise_sd = value.trim().parse().map_err(|_| DatasetError::ParseError {
                        row: 0,
                        reason: format!("bad noise_sd comment {value:?}"),
                    })?
                }
                _ => {}
            }
        }
    }
    let kind = kind.ok_or(DatasetError::MissingKind)?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() < 4 {
        return Err(DatasetError::ParseError {
            row: 0,
            reason: format!("expected at least 4 columns, found {}", headers.len()),
        });
    }
    let d = headers.len() - 3;
    let mut points_flat = Vec::new();
    let mut params_flat = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != headers.len() {
            return Err(DatasetError::ParseError {
                row,
                reason: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        let parse = |field: &str| -> Result<f64, DatasetError> {
            field.trim().parse().map_err(|_| DatasetError::ParseError {
                row,
                reason: format!("bad number {field:?}"),
            })
        };
        for c in 0..d {
            points_flat.push(parse(&record[c])?);
        }
        params_flat.push(parse(&record[d])?);
        params_flat.push(parse(&record[d + 1])?);
        labels.push(parse(&record[d + 2])?);
    }
    if labels.is_empty() {
        return Err(DatasetError::ParseError {
            row: 0,
            reason: "no data rows".to_string(),
        });
    }
    let n = labels.len();
    let points = Array2::from_shape_vec((n, d), points_flat).expect("row-major fill");
    let params = Array2::from_shape_vec((n, 2), params_flat).expect("row-major fill");
    Ok(ManifoldDataset {
        kind,
        points,
        params,
        labels: Array1::from(labels),
        noise_sd,
    })
}

/// Side length of the generated images.
pub const IMAGE_SIDE: usize = 32;
/// Flattened image length.
pub const IMAGE_PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;

#[derive(Debug, Clone)]
pub struct ImageDataset {
    /// n x 1024 pixel intensities in [0, 1], row-major 32 x 32.
    pub vectors: Array2<f64>,
    /// Pose angle in degrees, [0, 360).
    pub angles: Vec<f64>,
    pub object_id: String,
}

impl ImageDataset {
    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }
}

/// Renders `count` images of a fixed pattern of Gaussian blobs rotating about
/// the image center, at evenly spaced angles. Two blobs orbit at different
/// radii; one sits at the center so every image shares a landmark. Labels are
/// the rotation angles in degrees.
pub fn generate_rotating_images(count: usize) -> ImageDataset {
    // (orbit radius, phase offset, amplitude, blob width)
    const BLOBS: [(f64, f64, f64, f64); 3] = [
        (9.0, 0.0, 1.0, 2.5),
        (5.0, 2.0944, 0.7, 1.8),
        (0.0, 0.0, 0.5, 1.2),
    ];
    let center = (IMAGE_SIDE as f64 - 1.0) / 2.0;
    let mut vectors = Array2::zeros((count, IMAGE_PIXELS));
    let mut angles = Vec::with_capacity(count);
    for i in 0..count {
        let degrees = i as f64 * 360.0 / count as f64;
        angles.push(degrees);
        let theta = degrees.to_radians();
        for r in 0..IMAGE_SIDE {
            for c in 0..IMAGE_SIDE {
                let mut value = 0.0;
                for (radius, phase, amp, width) in BLOBS {
                    let cx = center + radius * (theta + phase).cos();
                    let cy = center + radius * (theta + phase).sin();
                    let d2 = (c as f64 - cx).powi(2) + (r as f64 - cy).powi(2);
                    value += amp * (-d2 / (2.0 * width * width)).exp();
                }
                vectors[(i, r * IMAGE_SIDE + c)] = value.min(1.0);
            }
        }
    }
    ImageDataset {
        vectors,
        angles,
        object_id: "rotating-pattern".to_string(),
    }
}

/// Writes an image dataset as CSV: 1024 pixel columns then the angle, no
/// header, with an object-id comment up front.
pub fn write_image_csv(dataset: &ImageDataset, path: &Path) -> Result<(), DatasetError> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "# object_id = {}", dataset.object_id)?;
    let mut writer = csv::Writer::from_writer(file);
    for row in 0..dataset.len() {
        let mut record = Vec::with_capacity(IMAGE_PIXELS + 1);
        for c in 0..IMAGE_PIXELS {
            record.push(dataset.vectors[(row, c)].to_string());
        }
        record.push(dataset.angles[row].to_string());
        writer.write_record(&record)?;
    }
    writer.flush().map_err(std::io::Error::from)?;
    Ok(())
}

/// Loads an image dataset: each data row must hold 1024 pixels and an angle.
/// Pixels are clamped to [0, 1]; rows come back sorted by angle.
pub fn load_images(path: &Path) -> Result<ImageDataset, DatasetError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let mut object_id = "unknown".to_string();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "object_id" {
                    object_id = value.trim().to_string();
                }
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != IMAGE_PIXELS + 1 {
            return Err(DatasetError::ParseError {
                row,
                reason: format!(
                    "expected {} fields, found {}",
                    IMAGE_PIXELS + 1,
                    record.len()
                ),
            });
        }
        let mut pixels = Vec::with_capacity(IMAGE_PIXELS);
        for field in record.iter().take(IMAGE_PIXELS) {
            let value: f64 = field.trim().parse().map_err(|_| DatasetError::ParseError {
                row,
                reason: format!("bad pixel {field:?}"),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::ParseError {
                    row,
                    reason: format!("non-finite pixel {value}"),
                });
            }
            pixels.push(value.clamp(0.0, 1.0));
        }
        let angle_field = &record[IMAGE_PIXELS];
        let angle: f64 = angle_field
            .trim()
            .parse()
            .map_err(|_| DatasetError::ParseError {
                row,
                reason: format!("bad angle {angle_field:?}"),
            })?;
        if !angle.is_finite() || !(0.0..360.0).contains(&angle) {
            return Err(DatasetError::AngleOutOfRange { row, angle });
        }
        rows.push((angle, pixels));
    }
    if rows.is_empty() {
        return Err(DatasetError::ParseError {
            row: 0,
            reason: "no data rows".to_string(),
        });
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = rows.len();
    let mut vectors = Array2::zeros((n, IMAGE_PIXELS));
    let mut angles = Vec::with_capacity(n);
    for (r, (angle, pixels)) in rows.into_iter().enumerate() {
        angles.push(angle);
        for (c, p) in pixels.into_iter().enumerate() {
            vectors[(r, c)] = p;
        }
    }
    Ok(ImageDataset {
        vectors,
        angles,
        object_id,
    })
}
