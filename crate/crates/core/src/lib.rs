//! Hafnian point processes, end to end.
//!
//! * [`matfun`]: hafnians, permanents, determinants and α-determinants.
//! * [`kernels`]: gridded windows, feature maps of a complex Gaussian field,
//!   its covariance / pseudo-covariance Gram matrices and the 2×2-block
//!   hafnian kernel.
//! * [`sampling`]: Gaussian field, Poisson and Cox process samplers on the
//!   grid, exact hafnian quadratures and Monte Carlo moment estimators.
//! * [`fock`]: a truncated symmetric Fock space in the occupation-number
//!   basis carrying the CCR representations whose particle densities have the
//!   Poisson and Cox processes as vacuum moments.

pub mod error;
pub mod fock;
pub mod kernels;
pub mod matfun;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
