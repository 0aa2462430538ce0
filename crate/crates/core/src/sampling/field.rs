use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::stream_rng;
use crate::error::{Error, Result};
use crate::kernels::{Features, GaussianFieldModel};

/// Relative eigenvalue floor below which the augmented covariance is
/// rejected; eigenvalues in `[-tol·norm, 0)` are clipped to zero.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Values `G(x_m)` of one draw of the field, one per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    pub values: Vec<C64>,
}

/// Covariance of `(Re G(x_1..x_M), Im G(x_1..x_M))`:
///
/// ```text
/// E[XXᵀ] = ½ Re(K1 + K2)    E[XYᵀ] = ½ (Im K2 − Im K1)
/// E[YXᵀ] = ½ (Im K2 + Im K1) E[YYᵀ] = ½ Re(K1 − K2)
/// ```
pub fn augmented_covariance(model: &GaussianFieldModel) -> Result<DMatrix<f64>> {
    let cov = raw_augmented(model);
    let eig = cov.clone().symmetric_eigen();
    check_psd(eig.eigenvalues.as_slice())?;
    Ok(cov)
}

fn raw_augmented(model: &GaussianFieldModel) -> DMatrix<f64> {
    let m = model.cells();
    let (k1, k2) = (model.k1(), model.k2());
    let mut cov = DMatrix::zeros(2 * m, 2 * m);
    for a in 0..m {
        for b in 0..m {
            // K2 is symmetric only up to rounding; average it so the result is exactly symmetric
            let k2ab = (k2[(a, b)] + k2[(b, a)]) * 0.5;
            let k1ab = k1[(a, b)];
            cov[(a, b)] = 0.5 * (k1ab.re + k2ab.re);
            cov[(m + a, m + b)] = 0.5 * (k1ab.re - k2ab.re);
            cov[(a, m + b)] = 0.5 * (k2ab.im - k1ab.im);
            cov[(m + a, b)] = 0.5 * (k2ab.im + k1ab.im);
        }
    }
    cov
}

fn check_psd(eigenvalues: &[f64]) -> Result<()> {
    let norm = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOLERANCE * norm {
        return Err(Error::Model(format!(
            "covariance / pseudo-covariance pair is not realizable: eigenvalue {min:.3e} (norm {norm:.3e})"
        )));
    }
    Ok(())
}

/// Draws fields with a given covariance / pseudo-covariance pair through a
/// symmetric square root of the augmented real covariance.
#[derive(Clone, Debug)]
pub struct FieldSampler {
    cells: usize,
    factor: DMatrix<f64>,
}

impl FieldSampler {
    pub fn new(model: &GaussianFieldModel) -> Result<Self> {
        let eig = raw_augmented(model).symmetric_eigen();
        check_psd(eig.eigenvalues.as_slice())?;
        let roots = DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()),
        );
        let mut factor = eig.eigenvectors;
        for (j, r) in roots.iter().enumerate() {
            factor.column_mut(j).scale_mut(*r);
        }
        Ok(Self { cells: model.cells(), factor })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Writes one draw into `out`; `scratch` is resized as needed.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Vec<f64>, out: &mut Vec<C64>) {
        let n = 2 * self.cells;
        scratch.clear();
        scratch.extend((0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        out.clear();
        for m in 0..self.cells {
            let mut x = 0.0;
            let mut y = 0.0;
            for (k, z) in scratch.iter().enumerate() {
                x += self.factor[(m, k)] * z;
                y += self.factor[(self.cells + m, k)] * z;
            }
            out.push(C64::new(x, y));
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldSample {
        let mut scratch = Vec::new();
        let mut values = Vec::new();
        self.sample_into(rng, &mut scratch, &mut values);
        FieldSample { values }
    }
}

/// One field draw, reproducible from `seed`.
pub fn sample_field(model: &GaussianFieldModel, seed: u64) -> Result<FieldSample> {
    Ok(FieldSampler::new(model)?.sample(&mut stream_rng(seed, 0)))
}

/// `replicates` field draws; replicate `r` uses stream `r`.
pub fn field_samples(model: &GaussianFieldModel, replicates: usize, seed: u64) -> Result<Vec<FieldSample>> {
    let sampler = FieldSampler::new(model)?;
    Ok((0..replicates)
        .into_par_iter()
        .map(|r| sampler.sample(&mut stream_rng(seed, r as u64)))
        .collect())
}

/// `G(x_m) = 2^{-1/2} (Σ_j ξ_j α[j][m] + i Σ_j η_j β[j][m])` with independent
/// standard normal `ξ`, `η`.
pub fn sample_field_direct_with<R: Rng + ?Sized>(alpha: &Features, beta: &Features, rng: &mut R) -> Result<FieldSample> {
    if alpha.dim() != beta.dim() || alpha.cells() != beta.cells() {
        return Err(Error::Dimension(format!(
            "alpha is {}x{}, beta is {}x{}",
            alpha.dim(),
            alpha.cells(),
            beta.dim(),
            beta.cells()
        )));
    }
    let xi: Vec<f64> = (0..alpha.dim()).map(|_| rng.sample(StandardNormal)).collect();
    let eta: Vec<f64> = (0..beta.dim()).map(|_| rng.sample(StandardNormal)).collect();
    let values = (0..alpha.cells())
        .map(|m| {
            let a: C64 = (0..alpha.dim()).map(|j| alpha.get(j, m) * xi[j]).sum();
            let b: C64 = (0..beta.dim()).map(|j| beta.get(j, m) * eta[j]).sum();
            (a + C64::i() * b) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    Ok(FieldSample { values })
}

pub fn sample_field_direct(alpha: &Features, beta: &Features, seed: u64) -> Result<FieldSample> {
    sample_field_direct_with(alpha, beta, &mut stream_rng(seed, 0))
}
