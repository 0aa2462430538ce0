use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{stream_rng, FieldSampler, PointPattern};
use crate::error::{Error, Result};
use crate::kernels::{block_kernel, pairwise_disjoint, CellSet, GaussianFieldModel, Grid};
use crate::matfun::{hafnian_dp, Limits};
use crate::report::MomentReport;

/// Number of batches behind every Monte Carlo standard error.
pub const BATCHES: usize = 100;

/// Bounds on the exact quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureLimits {
    pub max_order: usize,
    pub max_tuples: u64,
}

impl Default for QuadratureLimits {
    fn default() -> Self {
        Self { max_order: 4, max_tuples: 2_000_000 }
    }
}

fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Standard error of the mean of `values` from [`BATCHES`] contiguous batches
/// (value `i` goes to batch `i·B/n`); below `2B` values, the iid estimate.
pub fn batch_standard_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n < 2 * BATCHES {
        return sample_sd(values) / (n as f64).sqrt();
    }
    let mut sums = [0.0; BATCHES];
    let mut counts = [0usize; BATCHES];
    for (i, v) in values.iter().enumerate() {
        let b = i * BATCHES / n;
        sums[b] += v;
        counts[b] += 1;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    sample_sd(&means) / (BATCHES as f64).sqrt()
}

/// Monte Carlo estimate of `E[∏_i |G(x_{m_i})|²]`. Batch `b` draws from stream `b`.
pub fn field_moment_mc(model: &GaussianFieldModel, points: &[usize], n_samples: u64, seed: u64) -> Result<MomentReport> {
    if points.len() > 4 {
        return Err(Error::Precondition(format!("at most 4 points, got {}", points.len())));
    }
    if n_samples == 0 {
        return Err(Error::Precondition("n_samples must be positive".into()));
    }
    for &m in points {
        model.check_point(m)?;
    }
    let sampler = FieldSampler::new(model)?;
    let batches = (BATCHES as u64).min(n_samples);
    let batch_sums: Vec<(f64, u64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let size = n_samples / batches + u64::from(b < n_samples % batches);
            let mut rng = stream_rng(seed, b);
            let (mut scratch, mut g) = (Vec::new(), Vec::new());
            let mut sum = 0.0;
            for _ in 0..size {
                sampler.sample_into(&mut rng, &mut scratch, &mut g);
                sum += points.iter().map(|&m| g[m].norm_sqr()).product::<f64>();
            }
            (sum, size)
        })
        .collect();
    let total: f64 = batch_sums.iter().map(|(s, _)| s).sum();
    let mean = total / n_samples as f64;
    let means: Vec<f64> = batch_sums.iter().map(|(s, c)| s / *c as f64).collect();
    let se = if means.len() < 2 { 0.0 } else { sample_sd(&means) / (means.len() as f64).sqrt() };
    Ok(MomentReport::estimate(format!("field moment {points:?}"), mean, se, n_samples))
}

/// `Σ_{m_1∈Δ_1} ⋯ Σ_{m_n∈Δ_n} f(m_1..m_n) ∏ vol_{m_i}`, boxes may overlap.
/// Terms are summed in lexicographic tuple order.
pub fn tuple_quadrature<F>(grid: &Grid, boxes: &[CellSet], max_tuples: u64, f: F) -> Result<C64>
where
    F: Fn(&[usize]) -> Result<C64> + Sync,
{
    for b in boxes {
        grid.check_cells(b)?;
    }
    let count = boxes
        .iter()
        .try_fold(1u64, |acc, b| acc.checked_mul(b.len() as u64))
        .unwrap_or(u64::MAX);
    if count > max_tuples {
        return Err(Error::Capacity {
            what: "quadrature tuples",
            size: usize::try_from(count).unwrap_or(usize::MAX),
            limit: usize::try_from(max_tuples).unwrap_or(usize::MAX),
        });
    }
    let Some((first, rest)) = boxes.split_first() else {
        return f(&[]);
    };
    let partial: Vec<Result<C64>> = first
        .as_slice()
        .par_iter()
        .map(|&m0| {
            let mut tuple = vec![m0; boxes.len()];
            let mut idx = vec![0usize; rest.len()];
            let mut sum = C64::new(0.0, 0.0);
            if rest.iter().any(|b| b.is_empty()) {
                return Ok(sum);
            }
            loop {
                for (k, b) in rest.iter().enumerate() {
                    tuple[k + 1] = b.as_slice()[idx[k]];
                }
                let weight: f64 = tuple.iter().map(|&m| grid.volume(m)).product();
                sum += f(&tuple)? * weight;
                let mut k = rest.len();
                loop {
                    if k == 0 {
                        return Ok(sum);
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < rest[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        })
        .collect();
    partial.into_iter().sum()
}

fn haf_quadrature(model: &GaussianFieldModel, boxes: &[CellSet], limits: &QuadratureLimits) -> Result<C64> {
    if boxes.len() > limits.max_order {
        return Err(Error::Capacity { what: "quadrature order", size: boxes.len(), limit: limits.max_order });
    }
    let matfun_limits = Limits::default();
    tuple_quadrature(model.grid(), boxes, limits.max_tuples, |tuple| {
        hafnian_dp(&block_kernel(model, tuple)?.matrix, &matfun_limits)
    })
}

/// Exact `E[∏ γ(Δ_i)]` of the discrete Cox process over pairwise disjoint boxes,
/// as a hafnian quadrature.
pub fn quadrature_haf_moment(model: &GaussianFieldModel, boxes: &[CellSet], limits: &QuadratureLimits) -> Result<MomentReport> {
    if !pairwise_disjoint(boxes) {
        return Err(Error::Precondition("boxes must be pairwise disjoint".into()));
    }
    let value = haf_quadrature(model, boxes, limits)?;
    Ok(MomentReport::exact(format!("hafnian quadrature over {} boxes", boxes.len()), value.re))
}

/// Exact `E[(γ(Δ))_n] = E[(Σ_{m∈Δ} R_m vol_m)^n]`: the hafnian quadrature over `Δⁿ`.
pub fn factorial_moment_quadrature(model: &GaussianFieldModel, cells: &CellSet, n: usize, limits: &QuadratureLimits) -> Result<MomentReport> {
    let boxes = vec![cells.clone(); n];
    let value = haf_quadrature(model, &boxes, limits)?;
    Ok(MomentReport::exact(format!("factorial moment quadrature, order {n}"), value.re))
}

fn mean_report(label: String, values: &[f64]) -> MomentReport {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    MomentReport::estimate(label, mean, batch_standard_error(values), values.len() as u64)
}

/// Sample mean of `∏ γ(Δ_i)` over the patterns.
pub fn empirical_product_moment(patterns: &[PointPattern], boxes: &[CellSet]) -> Result<MomentReport> {
    if patterns.is_empty() {
        return Err(Error::Precondition("no patterns".into()));
    }
    if !pairwise_disjoint(boxes) {
        return Err(Error::Precondition("boxes must be pairwise disjoint".into()));
    }
    let values: Vec<f64> = patterns
        .iter()
        .map(|p| boxes.iter().map(|b| p.count(b) as f64).product())
        .collect();
    Ok(mean_report(format!("product moment over {} boxes", boxes.len()), &values))
}

/// Sample mean of the falling factorial `γ(Δ)(γ(Δ)−1)⋯(γ(Δ)−n+1)`.
pub fn empirical_factorial_moment(patterns: &[PointPattern], cells: &CellSet, n: usize) -> Result<MomentReport> {
    if n == 0 {
        return Err(Error::Precondition("factorial moment order must be at least 1".into()));
    }
    if patterns.is_empty() {
        return Err(Error::Precondition("no patterns".into()));
    }
    let values: Vec<f64> = patterns
        .iter()
        .map(|p| {
            let c = p.count(cells) as f64;
            (0..n).map(|k| c - k as f64).product()
        })
        .collect();
    Ok(mean_report(format!("factorial moment, order {n}"), &values))
}
