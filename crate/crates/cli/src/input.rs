//! Input dataset loading with format auto-detection.
//!
//! Manifold files carry a `# kind = ...` comment naming a surface; image
//! files carry `# object_id = ...` (or `kind = rotating-images` from this
//! tool's own generator). Detection reads only comment lines, so
//! reproducibility headers never confuse it.

use crate::error::CliError;
use ndarray::{Array1, Array2};
use odoem::datasets::{
    load_images, read_manifold_csv, ImageDataset, ManifoldDataset, ManifoldKind,
};
use std::path::Path;

#[derive(Debug)]
pub enum InputData {
    Manifold(ManifoldDataset),
    Images(ImageDataset),
}

impl InputData {
    pub fn len(&self) -> usize {
        match self {
            InputData::Manifold(d) => d.len(),
            InputData::Images(d) => d.len(),
        }
    }

    /// Splits into coordinate rows and labels, consuming the dataset.
    pub fn into_parts(self) -> (Array2<f64>, Array1<f64>) {
        match self {
            InputData::Manifold(d) => (d.points, d.labels),
            InputData::Images(d) => (d.vectors, Array1::from(d.angles)),
        }
    }
}

/// Loads a dataset CSV, deciding the format from its comment lines.
pub fn load_input(path: &Path) -> Result<InputData, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("input {}: {e}", path.display())))?;
    let mut kind = None;
    let mut has_object_id = false;
    for line in text.lines() {
        let Some(comment) = line.strip_prefix('#') else {
            continue;
        };
        if let Some((key, value)) = comment.split_once('=') {
            match key.trim() {
                "kind" => kind = Some(value.trim().to_string()),
                "object_id" => has_object_id = true,
                _ => {}
            }
        }
    }
    let is_manifold = matches!(&kind, Some(k) if ManifoldKind::from_name(k).is_ok());
    if is_manifold {
        return Ok(InputData::Manifold(read_manifold_csv(path)?));
    }
    if has_object_id || kind.as_deref() == Some("rotating-images") {
        return Ok(InputData::Images(load_images(path)?));
    }
    Err(CliError::Io(format!(
        "input {}: no `# kind` or `# object_id` comment identifies the format",
        path.display()
    )))
}
