use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::grid::{CellSet, Grid};
use crate::error::{Error, Result};
use crate::matfun::{ComplexMatrix, ComplexSymmetricMatrix};

/// Feature map sampled on the grid: a `dim × cells` complex matrix whose
/// column `m` is the feature vector at the center of cell `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Features {
    dim: usize,
    cells: usize,
    data: Vec<C64>,
}

impl Features {
    pub fn new(dim: usize, cells: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * cells {
            return Err(Error::Dimension(format!(
                "{} feature values for a {dim}x{cells} map",
                data.len()
            )));
        }
        Ok(Self { dim, cells, data })
    }

    pub fn from_fn(dim: usize, cells: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * cells);
        for j in 0..dim {
            for m in 0..cells {
                data.push(f(j, m));
            }
        }
        Self { dim, cells, data }
    }

    pub fn zeros(dim: usize, cells: usize) -> Self {
        Self::from_fn(dim, cells, |_, _| C64::new(0.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn get(&self, j: usize, m: usize) -> C64 {
        self.data[j * self.cells + m]
    }

    pub fn column(&self, m: usize) -> Vec<C64> {
        (0..self.dim).map(|j| self.get(j, m)).collect()
    }

    pub fn column_norm_sqr(&self, m: usize) -> f64 {
        (0..self.dim).map(|j| self.get(j, m).norm_sqr()).sum()
    }

    /// Stacks `self` over `below` along the feature axis.
    pub fn stack(&self, below: &Features) -> Result<Features> {
        if self.cells != below.cells {
            return Err(Error::Dimension(format!(
                "cannot stack maps over {} and {} cells",
                self.cells, below.cells
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(Features {
            dim: self.dim + below.dim,
            cells: self.cells,
            data,
        })
    }

    fn zip_with(&self, other: &Features, f: impl Fn(C64, C64) -> C64) -> Features {
        Features {
            dim: self.dim,
            cells: self.cells,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// `Σ_j a[j][m] · b[j][m']`, optionally conjugating `b`.
fn gram(a: &Features, b: &Features, m: usize, m2: usize, conj_b: bool) -> C64 {
    (0..a.dim)
        .map(|j| {
            let y = b.get(j, m2);
            a.get(j, m) * if conj_b { y.conj() } else { y }
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `(L1(x), J L2(y)) ≠ (L1(y), J L2(x))`
    Symmetry,
    /// `(L1(x), L1(y)) ≠ (L2(x), L2(y))`
    Norm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub cell: usize,
    pub other: usize,
    pub residual: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} condition fails at cells ({}, {}), residual {:.3e}",
            self.kind, self.cell, self.other, self.residual
        )
    }
}

/// Checks the two bilinear conditions under which `L1`, `L2` define a
/// commuting family of field operators. Returns every violated cell pair.
pub fn validate_features(l1: &Features, l2: &Features) -> Result<Vec<Violation>> {
    if l1.dim != l2.dim || l1.cells != l2.cells {
        return Err(Error::Dimension(format!(
            "L1 is {}x{}, L2 is {}x{}",
            l1.dim, l1.cells, l2.dim, l2.cells
        )));
    }
    let max_norm = (0..l1.cells)
        .flat_map(|m| [l1.column_norm_sqr(m), l2.column_norm_sqr(m)])
        .fold(0.0, f64::max);
    let tol = 1e-10 * (1.0 + max_norm);
    let mut out = Vec::new();
    for m in 0..l1.cells {
        for m2 in m..l1.cells {
            let sym = (gram(l1, l2, m, m2, false) - gram(l1, l2, m2, m, false)).norm();
            if sym > tol {
                out.push(Violation { kind: ViolationKind::Symmetry, cell: m, other: m2, residual: sym });
            }
            let norm = (gram(l1, l1, m, m2, true) - gram(l2, l2, m, m2, true)).norm();
            if norm > tol {
                out.push(Violation { kind: ViolationKind::Norm, cell: m, other: m2, residual: norm });
            }
        }
    }
    Ok(out)
}

/// Complex Gaussian field on a grid given by a validated pair of feature maps,
/// with its covariance `K1` and pseudo-covariance `K2` Gram matrices.
#[derive(Clone, Debug)]
pub struct GaussianFieldModel {
    grid: Grid,
    l1: Features,
    l2: Features,
    k1: ComplexMatrix,
    k2: ComplexMatrix,
}

impl GaussianFieldModel {
    pub fn new(grid: Grid, l1: Features, l2: Features) -> Result<Self> {
        if l1.cells != grid.cells() {
            return Err(Error::Dimension(format!(
                "feature maps cover {} cells, grid has {}",
                l1.cells,
                grid.cells()
            )));
        }
        let violations = validate_features(&l1, &l2)?;
        if !violations.is_empty() {
            let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::Model(format!(
                "feature maps violate the commutation conditions:\n  {}",
                list.join("\n  ")
            )));
        }
        let cells = grid.cells();
        let mut k1 = ComplexMatrix::zeros(cells);
        for m in 0..cells {
            for m2 in m..cells {
                let v = gram(&l1, &l1, m, m2, true);
                k1.set(m, m2, v);
                k1.set(m2, m, v.conj());
            }
        }
        let k2 = ComplexMatrix::from_fn(cells, |m, m2| gram(&l1, &l2, m, m2, false));
        Ok(Self { grid, l1, l2, k1, k2 })
    }

    /// The field that vanishes identically, with a single zero feature.
    pub fn zero(grid: Grid) -> Self {
        let cells = grid.cells();
        Self::new(grid, Features::zeros(1, cells), Features::zeros(1, cells))
            .expect("zero features satisfy every condition")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> usize {
        self.grid.cells()
    }

    pub fn feature_dim(&self) -> usize {
        self.l1.dim
    }

    pub fn l1(&self) -> &Features {
        &self.l1
    }

    pub fn l2(&self) -> &Features {
        &self.l2
    }

    /// Covariance `E[G(x) conj G(y)]`.
    pub fn k1(&self) -> &ComplexMatrix {
        &self.k1
    }

    /// Pseudo-covariance `E[G(x) G(y)]`.
    pub fn k2(&self) -> &ComplexMatrix {
        &self.k2
    }

    /// Smallest eigenvalue of the Hermitian matrix `K1`.
    pub fn k1_min_eigenvalue(&self) -> f64 {
        let m: DMatrix<C64> = self.k1.to_nalgebra();
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_point(&self, m: usize) -> Result<()> {
        if m >= self.cells() {
            return Err(Error::Range { index: m, len: self.cells() });
        }
        Ok(())
    }
}

/// Builds the field with `L1 = ((α+β)/2 ; (α−β)/2)` and
/// `L2 = ((α−β)/2 ; (α+β)/2)` in the doubled feature space, giving
/// `K1 = ½(⟨α,α⟩ + ⟨β,β⟩)` and `K2 = ½(α·α − β·β)`.
pub fn from_alpha_beta(alpha: &Features, beta: &Features, grid: Grid) -> Result<GaussianFieldModel> {
    if alpha.dim != beta.dim || alpha.cells != beta.cells {
        return Err(Error::Dimension(format!(
            "alpha is {}x{}, beta is {}x{}",
            alpha.dim, alpha.cells, beta.dim, beta.cells
        )));
    }
    let sum = alpha.zip_with(beta, |a, b| (a + b) * 0.5);
    let diff = alpha.zip_with(beta, |a, b| (a - b) * 0.5);
    let l1 = sum.stack(&diff)?;
    let l2 = diff.stack(&sum)?;
    GaussianFieldModel::new(grid, l1, l2)
}

/// The `2n × 2n` hafnian kernel at a tuple of grid points, made of the 2×2
/// blocks `[[K2, K1], [conj K1, conj K2]](x_i, x_j)`.
#[derive(Clone, Debug)]
pub struct BlockKernelMatrix {
    pub points: Vec<usize>,
    pub matrix: ComplexSymmetricMatrix,
}

pub fn block_kernel(model: &GaussianFieldModel, points: &[usize]) -> Result<BlockKernelMatrix> {
    for &m in points {
        model.check_point(m)?;
    }
    let (k1, k2) = (&model.k1, &model.k2);
    let entry = |p: usize, q: usize| {
        let (x, y) = (points[p / 2], points[q / 2]);
        match (p % 2, q % 2) {
            (0, 0) => k2[(x, y)],
            (0, 1) => k1[(x, y)],
            (1, 0) => k1[(x, y)].conj(),
            _ => k2[(x, y)].conj(),
        }
    };
    Ok(BlockKernelMatrix {
        points: points.to_vec(),
        matrix: ComplexSymmetricMatrix::from_upper(2 * points.len(), entry),
    })
}

/// `[[0, K(x_i,x_j)], [K(x_j,x_i), 0]]` blocks: its hafnian is `per[K]`.
pub fn permanental_embedding(k: &ComplexMatrix) -> ComplexSymmetricMatrix {
    ComplexSymmetricMatrix::from_upper(2 * k.dim(), |p, q| {
        let (i, j) = (p / 2, q / 2);
        match (p % 2, q % 2) {
            (0, 1) => k[(i, j)],
            (1, 0) => k[(j, i)],
            _ => C64::new(0.0, 0.0),
        }
    })
}

/// All four entries of each block equal `K(x_i, x_j)` (symmetric `K`): its
/// hafnian is the 2-determinant of `K`.
pub fn two_permanental_embedding(k: &ComplexMatrix) -> Result<ComplexSymmetricMatrix> {
    let sym = ComplexSymmetricMatrix::new(k.clone())?;
    Ok(ComplexSymmetricMatrix::from_upper(2 * k.dim(), |p, q| sym[(p / 2, q / 2)]))
}

/// `Σ_{m ∈ cells} vol_m ‖L1(x_m)‖²`, the expected number of points in the region.
pub fn intensity_integral(model: &GaussianFieldModel, cells: &CellSet) -> f64 {
    cells
        .iter()
        .map(|m| model.grid.volume(m) * model.l1.column_norm_sqr(m))
        .sum()
}

/// The same integral computed from `L2`.
pub fn intensity_integral_l2(model: &GaussianFieldModel, cells: &CellSet) -> f64 {
    cells
        .iter()
        .map(|m| model.grid.volume(m) * model.l2.column_norm_sqr(m))
        .sum()
}

/// Deterministic intensity `|λ(x)|²` of a Poisson process, through its square root `λ`.
#[derive(Clone, Debug)]
pub struct IntensityProfile {
    grid: Grid,
    lambda: Vec<C64>,
}

impl IntensityProfile {
    pub fn new(grid: Grid, lambda: Vec<C64>) -> Result<Self> {
        if lambda.len() != grid.cells() {
            return Err(Error::Dimension(format!(
                "{} lambda values for {} cells",
                lambda.len(),
                grid.cells()
            )));
        }
        if lambda.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Model("lambda values must be finite".into()));
        }
        Ok(Self { grid, lambda })
    }

    pub fn constant(grid: Grid, value: C64) -> Result<Self> {
        let cells = grid.cells();
        Self::new(grid, vec![value; cells])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn lambda(&self) -> &[C64] {
        &self.lambda
    }

    /// `Σ_{m ∈ cells} |λ_m|² vol_m`
    pub fn mass(&self, cells: &CellSet) -> f64 {
        cells
            .iter()
            .map(|m| self.lambda[m].norm_sqr() * self.grid.volume(m))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuiltinParams {
    /// Marginal variance `K1(x, x)`.
    pub variance: f64,
    pub lengthscale: f64,
    /// Number of spectral nodes; the feature dimension is twice this.
    pub frequencies: usize,
}

impl Default for BuiltinParams {
    fn default() -> Self {
        Self { variance: 1.0, lengthscale: 0.5, frequencies: 1 }
    }
}

pub const BUILTIN_MODELS: [&str; 3] = ["proper-fourier", "real-gauss", "alpha-beta-demo"];

/// Spectral nodes `ω_k` (positive half-line) and weights of the
/// squared-exponential covariance with the given lengthscale, by midpoint
/// rule on `[0, 2.5/ℓ]` against the Gaussian spectral density.
fn spectral_nodes(params: &BuiltinParams) -> Result<Vec<(f64, f64)>> {
    if params.frequencies == 0 || !(params.lengthscale > 0.0) || !(params.variance >= 0.0) {
        return Err(Error::Config(format!("invalid builtin parameters {params:?}")));
    }
    let k = params.frequencies;
    let top = 2.5 / params.lengthscale;
    let nodes: Vec<f64> = (0..k).map(|j| (j as f64 + 0.5) * top / k as f64).collect();
    let raw: Vec<f64> = nodes
        .iter()
        .map(|w| (-0.5 * (w * params.lengthscale).powi(2)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(nodes.into_iter().zip(raw.into_iter().map(|r| r / total)).collect())
}

/// Projection of a cell center onto the diagonal direction of the window.
fn coordinate(grid: &Grid, m: usize) -> f64 {
    let c = grid.center(m);
    c.iter().sum::<f64>() / (c.len() as f64).sqrt()
}

/// Named reference models:
///
/// * `proper-fourier`: `L1 = (L, 0)`, `L2 = (0, L)` with complex Fourier
///   features `L_k(x) = √(v w_k) e^{iω_k x}`; proper (`K2 = 0`).
/// * `real-gauss`: `L1 = L2 = L` with real cosine/sine features; a
///   real-valued field with `K1 = K2 = v Σ_k w_k cos(ω_k (x − y))`.
/// * `alpha-beta-demo`: the α/β construction with phase-shifted α and a
///   weaker counter-rotating β, so `K2 ≠ 0` and `K1` is complex.
pub fn builtin_model(name: &str, grid: Grid, params: &BuiltinParams) -> Result<GaussianFieldModel> {
    let nodes = spectral_nodes(params)?;
    let cells = grid.cells();
    let k = nodes.len();
    let amp = |w: f64| (params.variance * w).sqrt();
    match name {
        "proper-fourier" => {
            let l = Features::from_fn(k, cells, |j, m| {
                let (omega, w) = nodes[j];
                C64::from_polar(amp(w), omega * coordinate(&grid, m))
            });
            let zero = Features::zeros(k, cells);
            GaussianFieldModel::new(grid, l.stack(&zero)?, zero.stack(&l)?)
        }
        "real-gauss" => {
            let l = Features::from_fn(2 * k, cells, |j, m| {
                let (omega, w) = nodes[j / 2];
                let t = omega * coordinate(&grid, m);
                C64::new(amp(w) * if j % 2 == 0 { t.cos() } else { t.sin() }, 0.0)
            });
            GaussianFieldModel::new(grid, l.clone(), l)
        }
        "alpha-beta-demo" => {
            // K1(x,x) = v (a² + b²)/2 = v
            let (a, b) = (1.2, (2.0f64 - 1.44).sqrt());
            let alpha = Features::from_fn(k, cells, |j, m| {
                let (omega, w) = nodes[j];
                C64::from_polar(a * amp(w), omega * coordinate(&grid, m) + 0.3)
            });
            let beta = Features::from_fn(k, cells, |j, m| {
                let (omega, w) = nodes[j];
                C64::from_polar(b * amp(w), -0.5 * omega * coordinate(&grid, m) - 0.7)
            });
            from_alpha_beta(&alpha, &beta, grid)
        }
        other => Err(Error::Config(format!(
            "unknown builtin model {other:?}; expected one of {BUILTIN_MODELS:?}"
        ))),
    }
}

/// The proper field of a single feature map `L`, with `G = (G₁ + iG₂)/√2`
/// built from two independent copies of the `L1 = L2 = L` field.
pub fn proper_from(l: &Features, grid: Grid) -> Result<GaussianFieldModel> {
    from_alpha_beta(l, l, grid)
}

/// Field with the finite-dimensional distributions of `L1 = L2 = L`.
pub fn real_structured_from(l: &Features, grid: Grid) -> Result<GaussianFieldModel> {
    let scaled = l.zip_with(l, |a, _| a * std::f64::consts::SQRT_2);
    from_alpha_beta(&scaled, &Features::zeros(l.dim, l.cells), grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::{hafnian_dp, Limits};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_features(dim: usize, cells: usize, rng: &mut impl Rng) -> Features {
        Features::from_fn(dim, cells, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identical_maps_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = random_features(3, 5, &mut rng);
        assert!(validate_features(&l, &l).unwrap().is_empty());
    }

    #[test]
    fn proper_stacking_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = random_features(2, 4, &mut rng);
        let z = Features::zeros(2, 4);
        assert!(validate_features(&l.stack(&z).unwrap(), &z.stack(&l).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn unequal_norms_are_reported() {
        let l1 = Features::new(1, 1, vec![c(1.0, 0.0)]).unwrap();
        let l2 = Features::new(1, 1, vec![c(2.0, 0.0)]).unwrap();
        let v = validate_features(&l1, &l2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Norm);
        assert!((v[0].residual - 3.0).abs() < 1e-15);
        assert!(GaussianFieldModel::new(Grid::unit_interval(1).unwrap(), l1, l2).is_err());
    }

    #[test]
    fn shape_mismatch_is_a_dimension_error() {
        let a = Features::zeros(2, 3);
        let b = Features::zeros(1, 3);
        assert!(matches!(validate_features(&a, &b), Err(Error::Dimension(_))));
        assert!(matches!(from_alpha_beta(&a, &b, Grid::unit_interval(3).unwrap()), Err(Error::Dimension(_))));
    }

    #[test]
    fn alpha_beta_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (d, m) = (2, 4);
        let alpha = random_features(d, m, &mut rng);
        let beta = random_features(d, m, &mut rng);
        let model = from_alpha_beta(&alpha, &beta, Grid::unit_interval(m).unwrap()).unwrap();
        let k1 = ComplexMatrix::from_fn(m, |x, y| {
            (gram(&alpha, &alpha, x, y, true) + gram(&beta, &beta, x, y, true)) * 0.5
        });
        let k2 = ComplexMatrix::from_fn(m, |x, y| {
            (gram(&alpha, &alpha, x, y, false) - gram(&beta, &beta, x, y, false)) * 0.5
        });
        assert!(max_diff(model.k1(), &k1) < 1e-12);
        assert!(max_diff(model.k2(), &k2) < 1e-12);
    }

    #[test]
    fn alpha_equals_beta_is_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l = random_features(2, 3, &mut rng);
        let model = proper_from(&l, Grid::unit_interval(3).unwrap()).unwrap();
        assert!(model.k2().max_abs() < 1e-15);
    }

    #[test]
    fn scaled_alpha_reproduces_real_structured_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = random_features(2, 3, &mut rng);
        let grid = Grid::unit_interval(3).unwrap();
        let direct = GaussianFieldModel::new(grid.clone(), l.clone(), l.clone()).unwrap();
        let via = real_structured_from(&l, grid).unwrap();
        assert!(max_diff(direct.k1(), via.k1()) < 1e-12);
        assert!(max_diff(direct.k2(), via.k2()) < 1e-12);
    }

    #[test]
    fn zero_alpha_beta_gives_zero_kernels() {
        let z = Features::zeros(1, 2);
        let model = from_alpha_beta(&z, &z, Grid::unit_interval(2).unwrap()).unwrap();
        assert_eq!(model.k1().max_abs(), 0.0);
        assert_eq!(model.k2().max_abs(), 0.0);
    }

    #[test]
    fn builtins_have_their_advertised_structure() {
        let grid = Grid::unit_interval(5).unwrap();
        let params = BuiltinParams { frequencies: 2, ..Default::default() };
        let proper = builtin_model("proper-fourier", grid.clone(), &params).unwrap();
        assert!(validate_features(proper.l1(), proper.l2()).unwrap().is_empty());
        assert!(proper.k2().max_abs() < 1e-12);
        assert!(proper.k1().entries().iter().any(|z| z.im.abs() > 1e-3));

        let real = builtin_model("real-gauss", grid.clone(), &params).unwrap();
        assert!(max_diff(real.k1(), real.k2()) < 1e-12);
        assert!(real.k1().entries().iter().all(|z| z.im.abs() < 1e-12));
        assert!(max_diff(real.k1(), &real.k1().transpose()) < 1e-12);

        let mixed = builtin_model("alpha-beta-demo", grid.clone(), &params).unwrap();
        assert!(mixed.k2().max_abs() > 1e-2);
        assert!(mixed.k1().entries().iter().any(|z| z.im.abs() > 1e-3));
        for model in [&proper, &real, &mixed] {
            for m in 0..5 {
                assert!((model.k1()[(m, m)].re - params.variance).abs() < 1e-12);
            }
        }
        assert!(matches!(builtin_model("nope", grid, &params), Err(Error::Config(_))));
    }

    #[test]
    fn k1_is_hermitian_and_psd() {
        let grid = Grid::unit_interval(6).unwrap();
        let params = BuiltinParams { frequencies: 3, ..Default::default() };
        for name in BUILTIN_MODELS {
            let model = builtin_model(name, grid.clone(), &params).unwrap();
            let k1 = model.k1();
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(k1[(i, j)], k1[(j, i)].conj());
                }
            }
            let norm = k1.max_abs() * 6.0;
            assert!(model.k1_min_eigenvalue() >= -1e-10 * norm);
            assert!(max_diff(model.k2(), &model.k2().transpose()) < 1e-10);
        }
    }

    #[test]
    fn one_point_block_kernel() {
        let grid = Grid::unit_interval(3).unwrap();
        let model = builtin_model("alpha-beta-demo", grid, &BuiltinParams::default()).unwrap();
        let b = block_kernel(&model, &[1]).unwrap();
        let m = &b.matrix;
        assert_eq!(m[(0, 0)], model.k2()[(1, 1)]);
        assert_eq!(m[(0, 1)], model.k1()[(1, 1)]);
        assert_eq!(m[(1, 1)], model.k2()[(1, 1)].conj());
        let h = hafnian_dp(m, &Limits::default()).unwrap();
        assert_eq!(h, model.k1()[(1, 1)]);
        assert!(h.re >= 0.0);
    }

    #[test]
    fn proper_two_point_hafnian() {
        let grid = Grid::unit_interval(4).unwrap();
        let model = builtin_model("proper-fourier", grid, &BuiltinParams { frequencies: 2, ..Default::default() }).unwrap();
        let (a, b) = (0, 3);
        let h = hafnian_dp(&block_kernel(&model, &[a, b]).unwrap().matrix, &Limits::default()).unwrap();
        let k1 = model.k1();
        let expect = k1[(a, a)] * k1[(b, b)] + k1[(a, b)].norm_sqr();
        assert!((h - expect).norm() < 1e-12);
    }

    #[test]
    fn block_kernel_is_exactly_symmetric_and_range_checked() {
        let grid = Grid::unit_interval(4).unwrap();
        let model = builtin_model("alpha-beta-demo", grid, &BuiltinParams::default()).unwrap();
        let b = block_kernel(&model, &[2, 0, 2, 3]).unwrap();
        let m = b.matrix.as_matrix();
        for p in 0..8 {
            for q in 0..8 {
                assert_eq!(m[(p, q)], m[(q, p)]);
            }
        }
        assert!(matches!(block_kernel(&model, &[4]), Err(Error::Range { .. })));
    }

    #[test]
    fn intensity_integrals() {
        let grid = Grid::unit_interval(2).unwrap();
        let l = Features::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let model = GaussianFieldModel::new(grid, l.clone(), l).unwrap();
        assert_eq!(intensity_integral(&model, &CellSet::empty()), 0.0);
        assert!((intensity_integral(&model, &CellSet::single(0)) - 1.0).abs() < 1e-15);

        let proper = builtin_model("proper-fourier", Grid::unit_interval(7).unwrap(), &BuiltinParams::default()).unwrap();
        let all = proper.grid().all_cells();
        let trace: f64 = all.iter().map(|m| proper.grid().volume(m) * proper.k1()[(m, m)].re).sum();
        let i1 = intensity_integral(&proper, &all);
        assert!((i1 - trace).abs() <= 1e-12 * trace);
        assert!((i1 - intensity_integral_l2(&proper, &all)).abs() <= 1e-10 * i1);
    }

    #[test]
    fn profile_validation() {
        let grid = Grid::unit_interval(2).unwrap();
        assert!(IntensityProfile::new(grid.clone(), vec![c(1.0, 0.0)]).is_err());
        assert!(IntensityProfile::new(grid.clone(), vec![c(1.0, 0.0), c(f64::NAN, 0.0)]).is_err());
        let p = IntensityProfile::constant(grid, c(0.0, 2.0)).unwrap();
        assert!((p.mass(&CellSet::new([0, 1])) - 4.0).abs() < 1e-15);
    }
}
