use std::path::{Path, PathBuf};

use haflab::kernels::{builtin_model, load_model, BuiltinParams, CellSet, GaussianFieldModel, GridSpec, IntensityProfile};
use haflab::sampling::QuadratureLimits;
use haflab::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Constant([f64; 2]),
    PerCell(Vec<[f64; 2]>),
}

/// Where the process comes from. Model file paths are relative to the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSource {
    Builtin {
        name: String,
        #[serde(default)]
        params: BuiltinParams,
        grid: GridSpec,
    },
    File {
        path: PathBuf,
    },
    Zero {
        grid: GridSpec,
    },
    Poisson {
        grid: GridSpec,
        lambda: LambdaSpec,
    },
}

/// One experiment: a single JSON document, with command-line flags able to
/// override the seed, replicate count and output path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSource,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub boxes: Vec<CellSet>,
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    /// Fock-space cutoff; raised to twice the largest order when smaller.
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub quadrature: QuadratureLimits,
}

fn default_replicates() -> usize {
    10_000
}

fn default_orders() -> Vec<usize> {
    vec![1, 2]
}

fn default_mc_samples() -> u64 {
    100_000
}

pub enum Source {
    Cox(GaussianFieldModel),
    Poisson(IntensityProfile),
}

impl Source {
    pub fn cells(&self) -> usize {
        match self {
            Source::Cox(m) => m.cells(),
            Source::Poisson(p) => p.grid().cells(),
        }
    }
}

pub struct Loaded {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

impl Loaded {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir })
    }

    /// SHA-256 of the effective configuration, after flag overrides. The
    /// output location is excluded.
    pub fn hash(&self) -> String {
        let config = ExperimentConfig { output: None, ..self.config.clone() };
        let canonical = serde_json::to_string(&config).expect("configs always serialize");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn source(&self) -> Result<Source> {
        match &self.config.model {
            ModelSource::Builtin { name, params, grid } => Ok(Source::Cox(builtin_model(name, grid.build()?, params)?)),
            ModelSource::File { path } => {
                let full = if path.is_absolute() { path.clone() } else { self.base_dir.join(path) };
                Ok(Source::Cox(load_model(&full)?))
            }
            ModelSource::Zero { grid } => Ok(Source::Cox(GaussianFieldModel::zero(grid.build()?))),
            ModelSource::Poisson { grid, lambda } => {
                let grid = grid.build()?;
                let values = match lambda {
                    LambdaSpec::Constant([re, im]) => vec![C64::new(*re, *im); grid.cells()],
                    LambdaSpec::PerCell(v) => v.iter().map(|&[re, im]| C64::new(re, im)).collect(),
                };
                Ok(Source::Poisson(IntensityProfile::new(grid, values)?))
            }
        }
    }

    pub fn max_order(&self) -> usize {
        self.config.orders.iter().copied().max().unwrap_or(0)
    }

    pub fn truncation(&self) -> usize {
        self.config.truncation.unwrap_or(0).max(2 * self.max_order())
    }

    /// The configured boxes, or one single-cell box per order when none are
    /// given. Every prefix used by an order must be pairwise disjoint.
    pub fn boxes(&self, cells: usize) -> Result<Vec<CellSet>> {
        let n = self.max_order();
        if self.config.orders.contains(&0) {
            return Err(Error::Config("orders must be positive".into()));
        }
        let boxes = if self.config.boxes.is_empty() {
            if n > cells {
                return Err(Error::Config(format!("order {n} needs {n} cells, the grid has {cells}")));
            }
            (0..n).map(CellSet::single).collect()
        } else {
            self.config.boxes.clone()
        };
        if n > boxes.len() {
            return Err(Error::Config(format!("order {n} needs {n} boxes, {} given", boxes.len())));
        }
        for b in &boxes {
            if b.is_empty() {
                return Err(Error::Config("boxes must be nonempty".into()));
            }
            if let Some(m) = b.iter().find(|&m| m >= cells) {
                return Err(Error::Config(format!("box cell {m} outside a grid of {cells} cells")));
            }
        }
        if !haflab::kernels::pairwise_disjoint(&boxes[..n]) {
            return Err(Error::Config(format!("the first {n} boxes must be pairwise disjoint")));
        }
        Ok(boxes)
    }
}
