//! Truncated symmetric Fock space over `ℰ = ℂ^M ⊕ ℂ^d` (grid modes, then
//! feature modes) in the occupation-number basis, with the CCR
//! representations whose particle densities `ρ(Δ)` have the Poisson and Cox
//! processes as vacuum moments.
//!
//! Transitions above the cutoff `N` are dropped. An entry `(i, j)` of a
//! product of `k` single ladder steps is exact when
//! `total(i) + total(j) ≤ 2N − k`; identities are asserted on the states
//! below [`safe_total`]. Vacuum expectations of `n` densities are exact for
//! `N ≥ 2n`.

mod basis;
mod bogoliubov;
pub mod checks;
mod field;
mod operator;
mod representation;

pub use basis::{state_count, FockBasis, MAX_STATES};
pub use bogoliubov::{bogoliubov_check, bogoliubov_partner, bogoliubov_two_point};
pub use checks::safe_total;
pub use field::{field_product_expectation, phi, psi};
pub use operator::FockOperator;
pub use representation::{CcrRepresentation, RepresentationKind, DEFAULT_WICK_ORDER};
