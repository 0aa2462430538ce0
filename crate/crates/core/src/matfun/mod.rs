//! Exact matrix functions of small complex matrices: hafnians (two
//! independent algorithms), permanents, determinants and α-determinants.

mod hafnian;
mod matrix;
mod permanent;
#[cfg(test)]
mod properties;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use hafnian::{hafnian_dp, hafnian_enum, pairing_count, visit_pairings};
pub use matrix::{ComplexMatrix, ComplexSymmetricMatrix};
pub use permanent::{alpha_det, determinant, permanent};

use crate::error::{Error, Result};

/// Size caps for the exponential-time routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    pub hafnian_enum: usize,
    pub hafnian_dp: usize,
    pub permanent: usize,
    pub alpha_det: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            hafnian_enum: 16,
            hafnian_dp: 24,
            permanent: 20,
            alpha_det: 10,
        }
    }
}

pub(crate) fn check_capacity(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        return Err(Error::Capacity { what, size, limit });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HafnianAlgo {
    Enum,
    Dp,
}

impl HafnianAlgo {
    pub fn name(self) -> &'static str {
        match self {
            HafnianAlgo::Enum => "enum",
            HafnianAlgo::Dp => "dp",
        }
    }
}

pub fn hafnian(c: &ComplexSymmetricMatrix, algo: HafnianAlgo, limits: &Limits) -> Result<num_complex::Complex64> {
    match algo {
        HafnianAlgo::Enum => hafnian_enum(c, limits),
        HafnianAlgo::Dp => hafnian_dp(c, limits),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub size: usize,
    pub repetitions: usize,
    pub median_seconds: f64,
}

/// Each repetition loops until this much time has passed and reports the per-call mean.
const MIN_SAMPLE_TIME: Duration = Duration::from_millis(2);

/// Median wall-clock time of each hafnian algorithm on random complex
/// symmetric matrices, one row per (algorithm, size).
pub fn bench_hafnian(sizes: &[usize], repetitions: usize, limits: &Limits, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(2 * sizes.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &size in sizes {
        let m = ComplexSymmetricMatrix::random(size, &mut rng);
        for algo in [HafnianAlgo::Enum, HafnianAlgo::Dp] {
            let mut times = Vec::with_capacity(repetitions);
            for _ in 0..repetitions.max(1) {
                let start = Instant::now();
                let mut calls = 0u32;
                while calls == 0 || start.elapsed() < MIN_SAMPLE_TIME {
                    std::hint::black_box(hafnian(&m, algo, limits)?);
                    calls += 1;
                }
                times.push((start.elapsed().as_secs_f64() / f64::from(calls)).max(f64::MIN_POSITIVE));
            }
            times.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                algorithm: algo.name().into(),
                size,
                repetitions: repetitions.max(1),
                median_seconds: times[times.len() / 2],
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_shape() {
        let rows = bench_hafnian(&[8], 3, &Limits::default(), 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.median_seconds > 0.0 && r.size == 8));
        assert!(bench_hafnian(&[], 3, &Limits::default(), 1).unwrap().is_empty());
    }

    #[test]
    fn bench_dp_scales_better_at_twelve() {
        let rows = bench_hafnian(&[8, 12], 5, &Limits::default(), 2).unwrap();
        let t = |algo: &str, size: usize| {
            rows.iter()
                .find(|r| r.algorithm == algo && r.size == size)
                .unwrap()
                .median_seconds
        };
        let enum_growth = t("enum", 12) / t("enum", 8);
        let dp_growth = t("dp", 12) / t("dp", 8);
        assert!(dp_growth < enum_growth, "dp growth {dp_growth}, enum growth {enum_growth}");
    }

    #[test]
    fn bench_propagates_capacity_errors() {
        let l = Limits { hafnian_enum: 6, ..Limits::default() };
        assert!(bench_hafnian(&[8], 1, &l, 0).is_err());
    }
}
