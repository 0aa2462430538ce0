use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite partition of an axis-aligned window into cells, each carrying a
/// center and its reference-measure volume.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    centers: Vec<Vec<f64>>,
    volumes: Vec<f64>,
}

impl Grid {
    /// Regular grid with `cells_per_axis[k]` equal cells along axis `k`.
    /// Cells are numbered with the last axis varying fastest.
    pub fn regular(lower: &[f64], upper: &[f64], cells_per_axis: &[usize]) -> Result<Self> {
        let dim = lower.len();
        if dim == 0 || upper.len() != dim || cells_per_axis.len() != dim {
            return Err(Error::Dimension(format!(
                "window bounds {}/{} and cell counts {} must share a positive dimension",
                lower.len(),
                upper.len(),
                cells_per_axis.len()
            )));
        }
        for k in 0..dim {
            if !(upper[k] > lower[k]) || !lower[k].is_finite() || !upper[k].is_finite() {
                return Err(Error::Config(format!("empty window along axis {k}")));
            }
            if cells_per_axis[k] == 0 {
                return Err(Error::Config(format!("no cells along axis {k}")));
            }
        }
        let widths: Vec<f64> = (0..dim)
            .map(|k| (upper[k] - lower[k]) / cells_per_axis[k] as f64)
            .collect();
        let cell_volume: f64 = widths.iter().product();
        let total: usize = cells_per_axis.iter().product();
        let mut centers = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            centers.push(
                (0..dim)
                    .map(|k| lower[k] + (idx[k] as f64 + 0.5) * widths[k])
                    .collect(),
            );
            for k in (0..dim).rev() {
                idx[k] += 1;
                if idx[k] < cells_per_axis[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            centers,
            volumes: vec![cell_volume; total],
        })
    }

    pub fn interval(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        Self::regular(&[lo], &[hi], &[cells])
    }

    pub fn unit_interval(cells: usize) -> Result<Self> {
        Self::interval(0.0, 1.0, cells)
    }

    /// Grid with explicit (possibly unequal) cells; the volumes must exhaust the window.
    pub fn from_cells(lower: &[f64], upper: &[f64], centers: Vec<Vec<f64>>, volumes: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || centers.len() != volumes.len() {
            return Err(Error::Dimension(format!(
                "{} centers and {} volumes",
                centers.len(),
                volumes.len()
            )));
        }
        let dim = lower.len();
        if dim == 0 || upper.len() != dim || centers.iter().any(|c| c.len() != dim) {
            return Err(Error::Dimension("cell centers must match the window dimension".into()));
        }
        if volumes.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Config("cell volumes must be positive and finite".into()));
        }
        let window: f64 = (0..dim).map(|k| upper[k] - lower[k]).product();
        let total: f64 = volumes.iter().sum();
        if ((total - window) / window).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "cell volumes sum to {total}, window volume is {window}"
            )));
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                if centers[i] == centers[j] {
                    return Err(Error::Config(format!("cells {i} and {j} share a center")));
                }
            }
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            centers,
            volumes,
        })
    }

    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    pub fn space_dim(&self) -> usize {
        self.lower.len()
    }

    pub fn center(&self, m: usize) -> &[f64] {
        &self.centers[m]
    }

    pub fn volume(&self, m: usize) -> f64 {
        self.volumes[m]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn window_volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn all_cells(&self) -> CellSet {
        CellSet::new(0..self.cells())
    }

    pub fn check_cells(&self, cells: &CellSet) -> Result<()> {
        match cells.iter().find(|&m| m >= self.cells()) {
            Some(index) => Err(Error::Range { index, len: self.cells() }),
            None => Ok(()),
        }
    }

    pub fn volume_of(&self, cells: &CellSet) -> f64 {
        cells.iter().map(|m| self.volumes[m]).sum()
    }
}

/// A region of the window, as a set of cell indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct CellSet(Vec<usize>);

impl CellSet {
    pub fn new(cells: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = cells.into_iter().collect();
        Self(set.into_iter().collect())
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(m: usize) -> Self {
        Self(vec![m])
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: usize) -> bool {
        self.0.binary_search(&m).is_ok()
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        Self(self.iter().filter(|&m| other.contains(m)).collect())
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.iter().all(|m| !other.contains(m))
    }
}

impl From<Vec<usize>> for CellSet {
    fn from(v: Vec<usize>) -> Self {
        Self::new(v)
    }
}

impl From<CellSet> for Vec<usize> {
    fn from(c: CellSet) -> Self {
        c.0
    }
}

pub fn pairwise_disjoint(boxes: &[CellSet]) -> bool {
    boxes
        .iter()
        .enumerate()
        .all(|(i, a)| boxes[i + 1..].iter().all(|b| a.is_disjoint(b)))
}
