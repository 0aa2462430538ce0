use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::model::{validate_features, Features, GaussianFieldModel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellCounts {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

/// Regular grid description: one `[lo, hi]` pair per axis and the number of
/// cells (a single count for 1-D windows, or one count per axis).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub window: Vec<[f64; 2]>,
    pub cells: CellCounts,
}

impl GridSpec {
    pub fn unit(cells: usize) -> Self {
        Self { window: vec![[0.0, 1.0]], cells: CellCounts::Uniform(cells) }
    }

    pub fn build(&self) -> Result<Grid> {
        let lower: Vec<f64> = self.window.iter().map(|w| w[0]).collect();
        let upper: Vec<f64> = self.window.iter().map(|w| w[1]).collect();
        let cells = match &self.cells {
            CellCounts::Uniform(n) => vec![*n; lower.len()],
            CellCounts::PerAxis(v) => v.clone(),
        };
        Grid::regular(&lower, &upper, &cells)
    }
}

/// On-disk model: complex matrices are `feature_dim` rows of `[re, im]` pairs, one per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub grid: GridSpec,
    pub feature_dim: usize,
    #[serde(rename = "L1")]
    pub l1: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "L2")]
    pub l2: Vec<Vec<[f64; 2]>>,
}

fn features_from_rows(rows: &[Vec<[f64; 2]>], dim: usize, cells: usize, name: &str) -> Result<Features> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != cells) {
        return Err(Error::Dimension(format!(
            "{name} must be {dim} rows of {cells} [re, im] pairs"
        )));
    }
    let data = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    Features::new(dim, cells, data)
}

fn rows_from_features(f: &Features) -> Vec<Vec<[f64; 2]>> {
    (0..f.dim())
        .map(|j| (0..f.cells()).map(|m| [f.get(j, m).re, f.get(j, m).im]).collect())
        .collect()
}

impl ModelFile {
    pub fn from_model(model: &GaussianFieldModel, grid: GridSpec) -> Self {
        Self {
            grid,
            feature_dim: model.feature_dim(),
            l1: rows_from_features(model.l1()),
            l2: rows_from_features(model.l2()),
        }
    }

    /// Builds the model; invalid feature maps are rejected with the list of violations.
    pub fn into_model(self) -> Result<GaussianFieldModel> {
        let grid = self.grid.build()?;
        let cells = grid.cells();
        let l1 = features_from_rows(&self.l1, self.feature_dim, cells, "L1")?;
        let l2 = features_from_rows(&self.l2, self.feature_dim, cells, "L2")?;
        let violations = validate_features(&l1, &l2)?;
        if !violations.is_empty() {
            let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::Model(format!("invalid model file:\n  {}", list.join("\n  "))));
        }
        GaussianFieldModel::new(grid, l1, l2)
    }
}

pub fn load_model(path: &Path) -> Result<GaussianFieldModel> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)?;
    file.into_model()
}
