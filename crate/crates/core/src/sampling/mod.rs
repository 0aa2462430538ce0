//! Complex Gaussian fields, Poisson and Cox point processes on the grid, and
//! their moments: Monte Carlo estimates against exact hafnian quadratures.
//!
//! Randomness comes from one 64-bit root seed. Replicate (or batch) `r` uses
//! a ChaCha8 generator keyed by the root seed with stream number `r`, so
//! replicates are independent, reproducible and can run in any order.

mod field;
mod moments;
mod process;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use field::{
    augmented_covariance, field_samples, sample_field, sample_field_direct, sample_field_direct_with,
    FieldSample, FieldSampler, PSD_TOLERANCE,
};
pub use moments::{
    batch_standard_error, empirical_factorial_moment, empirical_product_moment,
    factorial_moment_quadrature, field_moment_mc, quadrature_haf_moment, tuple_quadrature,
    QuadratureLimits, BATCHES,
};
pub use process::{
    cox_patterns, poisson_patterns, sample_cox, sample_poisson, write_patterns_csv, CoxSampler,
    PointPattern,
};

/// Generator for stream `stream` under root seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
