use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::{stream_rng, FieldSample, FieldSampler};
use crate::error::Result;
use crate::kernels::{CellSet, GaussianFieldModel, IntensityProfile};

/// Counts per grid cell of one configuration restricted to the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointPattern {
    pub counts: Vec<u64>,
}

impl PointPattern {
    pub fn empty(cells: usize) -> Self {
        Self { counts: vec![0; cells] }
    }

    /// `γ(Δ)`; indices outside the grid count as empty.
    pub fn count(&self, cells: &CellSet) -> u64 {
        cells.iter().filter_map(|m| self.counts.get(m)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean > 0.0 {
        Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
    } else {
        0
    }
}

fn sample_poisson_with<R: Rng + ?Sized>(profile: &IntensityProfile, rng: &mut R) -> PointPattern {
    let grid = profile.grid();
    let counts = profile
        .lambda()
        .iter()
        .enumerate()
        .map(|(m, l)| poisson_count(rng, l.norm_sqr() * grid.volume(m)))
        .collect();
    PointPattern { counts }
}

/// Independent counts with means `|λ_m|² vol_m`.
pub fn sample_poisson(profile: &IntensityProfile, seed: u64) -> PointPattern {
    sample_poisson_with(profile, &mut stream_rng(seed, 0))
}

/// `replicates` Poisson patterns; replicate `r` uses stream `r`.
pub fn poisson_patterns(profile: &IntensityProfile, replicates: usize, seed: u64) -> Vec<PointPattern> {
    (0..replicates)
        .into_par_iter()
        .map(|r| sample_poisson_with(profile, &mut stream_rng(seed, r as u64)))
        .collect()
}

/// Cox process directed by `R = |G|²`: a field draw followed by conditionally
/// independent Poisson counts.
#[derive(Clone, Debug)]
pub struct CoxSampler {
    field: FieldSampler,
    volumes: Vec<f64>,
}

impl CoxSampler {
    pub fn new(model: &GaussianFieldModel) -> Result<Self> {
        Ok(Self {
            field: FieldSampler::new(model)?,
            volumes: model.grid().volumes().to_vec(),
        })
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> (FieldSample, PointPattern) {
        let field = self.field.sample(rng);
        let counts = field
            .values
            .iter()
            .zip(&self.volumes)
            .map(|(g, v)| poisson_count(rng, g.norm_sqr() * v))
            .collect();
        (field, PointPattern { counts })
    }
}

pub fn sample_cox(model: &GaussianFieldModel, seed: u64) -> Result<PointPattern> {
    Ok(CoxSampler::new(model)?.sample_with(&mut stream_rng(seed, 0)).1)
}

/// `replicates` Cox patterns; replicate `r` uses stream `r`.
pub fn cox_patterns(model: &GaussianFieldModel, replicates: usize, seed: u64) -> Result<Vec<PointPattern>> {
    let sampler = CoxSampler::new(model)?;
    Ok((0..replicates)
        .into_par_iter()
        .map(|r| sampler.sample_with(&mut stream_rng(seed, r as u64)).1)
        .collect())
}

/// CSV with header `replicate,cell_index,count`, one row per cell and replicate.
pub fn write_patterns_csv<W: Write>(mut out: W, patterns: &[PointPattern]) -> io::Result<()> {
    writeln!(out, "replicate,cell_index,count")?;
    for (r, p) in patterns.iter().enumerate() {
        for (m, c) in p.counts.iter().enumerate() {
            writeln!(out, "{r},{m},{c}")?;
        }
    }
    Ok(())
}
