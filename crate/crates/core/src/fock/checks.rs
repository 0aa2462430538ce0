//! Named identity checks on a representation, each producing a [`CheckRecord`].

use num_complex::Complex64 as C64;

use super::{field_product_expectation, CcrRepresentation, FockOperator};
use crate::error::Result;
use crate::kernels::{block_kernel, CellSet, GaussianFieldModel, IntensityProfile};
use crate::matfun::{hafnian_dp, Limits};
use crate::report::CheckRecord;
use crate::sampling::{quadrature_haf_moment, QuadratureLimits};

/// Largest total occupation on which a product of `steps` single ladder
/// steps is unaffected by the cutoff (row and column totals both bounded).
pub fn safe_total(truncation: usize, steps: usize) -> usize {
    truncation.saturating_sub(steps.div_ceil(2))
}

/// `|a − b| / |b|`, or `|a − b|` when `b = 0`.
pub fn relative_error(a: C64, b: C64) -> f64 {
    let diff = (a - b).norm();
    if b.norm() > 0.0 {
        diff / b.norm()
    } else {
        diff
    }
}

fn describe(boxes: &[CellSet]) -> String {
    let parts: Vec<String> = boxes.iter().map(|b| format!("{:?}", b.as_slice())).collect();
    parts.join("x")
}

/// `[A⁻(x_a), A⁺(x_b)] = δ_ab / vol_a` and the vanishing commutators, for all point pairs.
pub fn ccr_checks(rep: &CcrRepresentation, tolerance: f64) -> Vec<CheckRecord> {
    let safe = safe_total(rep.truncation(), 2);
    let mut out = Vec::new();
    for a in 0..rep.points() {
        for b in 0..rep.points() {
            let delta = if a == b { 1.0 / rep.volumes()[a] } else { 0.0 };
            let comm = rep.a_minus(a).commutator(rep.a_plus(b));
            let res = (&comm - &FockOperator::scalar(rep.basis(), C64::new(delta, 0.0))).restricted_norm(safe);
            let pp = rep.a_plus(a).commutator(rep.a_plus(b)).restricted_norm(safe);
            let mm = rep.a_minus(a).commutator(rep.a_minus(b)).restricted_norm(safe);
            out.push(CheckRecord::new(format!("ccr [A-({a}), A+({b})]"), res.max(pp).max(mm), tolerance));
        }
    }
    out
}

/// Hermiticity of `ρ(Δ)` (tolerance 1e-13).
pub fn density_hermiticity(rep: &CcrRepresentation, cells: &CellSet) -> Result<CheckRecord> {
    let rho = rep.density(cells)?;
    let res = (&rho - &rho.adjoint()).restricted_norm(safe_total(rep.truncation(), 4));
    Ok(CheckRecord::new(format!("density hermiticity {:?}", cells.as_slice()), res, 1e-13))
}

/// `[ρ(Δ_1), ρ(Δ_2)] = 0` (tolerance 1e-10).
pub fn density_commutator(rep: &CcrRepresentation, a: &CellSet, b: &CellSet) -> Result<CheckRecord> {
    let res = rep.density(a)?.commutator(&rep.density(b)?).restricted_norm(safe_total(rep.truncation(), 4));
    Ok(CheckRecord::new(format!("density commutator {}", describe(&[a.clone(), b.clone()])), res, 1e-10))
}

/// `n! θ⁽ⁿ⁾(Δ_1×⋯×Δ_n)` against the hafnian quadrature (relative 1e-9).
pub fn theta_hafnian_check(model: &GaussianFieldModel, rep: &CcrRepresentation, boxes: &[CellSet], limits: &QuadratureLimits) -> Result<CheckRecord> {
    let factorial: f64 = (1..=boxes.len()).map(|k| k as f64).product();
    let theta = rep.theta(boxes)? * factorial;
    let quad = quadrature_haf_moment(model, boxes, limits)?.complex();
    Ok(CheckRecord::new(format!("theta vs hafnian quadrature {}", describe(boxes)), relative_error(theta, quad), 1e-9))
}

/// `θ⁽ⁿ⁾ = (1/n!) ∏_i Σ_{m∈Δ_i} |λ_m|² vol_m` (tolerance 1e-10).
pub fn poisson_theta_check(profile: &IntensityProfile, rep: &CcrRepresentation, boxes: &[CellSet]) -> Result<CheckRecord> {
    let factorial: f64 = (1..=boxes.len()).map(|k| k as f64).product();
    let expected: f64 = boxes.iter().map(|b| profile.mass(b)).product::<f64>() / factorial;
    let theta = rep.theta(boxes)?;
    Ok(CheckRecord::new(format!("poisson theta {}", describe(boxes)), (theta - expected).norm(), 1e-10))
}

/// `T⁽¹⁾ = 0` for each function, `T⁽³⁾ = 0`, and `T⁽⁴⁾` against its pair partitions.
/// Functions are centered, so `T⁽¹⁾` is reported only for representations whose
/// vacuum field mean is zero.
pub fn quasifree_checks(rep: &CcrRepresentation, hs: &[Vec<C64>; 4], centered_mean: bool) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    if centered_mean {
        let t1 = hs.iter().map(|h| rep.t1(h).map(|t| t.norm())).collect::<Result<Vec<_>>>()?;
        out.push(CheckRecord::new("T1 vanishes", t1.into_iter().fold(0.0, f64::max), 1e-10));
    }
    out.push(CheckRecord::new("T3 vanishes", rep.quasifree_t(&hs[..3])?.norm(), 1e-10));
    let t2 = |i: usize, j: usize| rep.quasifree_t(&[hs[i].clone(), hs[j].clone()]);
    let pairs = t2(0, 1)? * t2(2, 3)? + t2(0, 2)? * t2(1, 3)? + t2(0, 3)? * t2(1, 2)?;
    let four = rep.quasifree_t(hs)?;
    out.push(CheckRecord::new("T4 pair-partition expansion", (four - pairs).norm(), 1e-9));
    Ok(out)
}

/// `⟨Ψ⋯Ψ Φ⋯Φ Ω, Ω⟩ = haf(block kernel)` (relative 1e-10).
pub fn bridge_check(model: &GaussianFieldModel, points: &[usize]) -> Result<CheckRecord> {
    let fock = field_product_expectation(model, points)?;
    let haf = hafnian_dp(&block_kernel(model, points)?.matrix, &Limits::default())?;
    Ok(CheckRecord::new(format!("gaussian moment bridge {points:?}"), relative_error(fock, haf), 1e-10))
}
