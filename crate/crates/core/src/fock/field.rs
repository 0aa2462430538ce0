use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::{FockBasis, FockOperator};
use crate::error::{Error, Result};
use crate::kernels::GaussianFieldModel;

/// The feature modes are the last `d` modes of the basis.
fn feature_vector(basis: &FockBasis, model: &GaussianFieldModel, v: impl Iterator<Item = C64>) -> Result<Vec<C64>> {
    let d = model.feature_dim();
    if basis.modes() < d {
        return Err(Error::Dimension(format!("{} modes cannot hold {d} feature modes", basis.modes())));
    }
    let mut out = vec![C64::new(0.0, 0.0); basis.modes() - d];
    out.extend(v);
    Ok(out)
}

/// `Φ(x_m) = a⁺(L1(x_m)) + a⁻(L2(x_m))` on the feature modes.
pub fn phi(basis: &Arc<FockBasis>, model: &GaussianFieldModel, m: usize) -> Result<FockOperator> {
    model.check_point(m)?;
    let d = model.feature_dim();
    let up = feature_vector(basis, model, (0..d).map(|j| model.l1().get(j, m)))?;
    let down = feature_vector(basis, model, (0..d).map(|j| model.l2().get(j, m)))?;
    Ok(&FockOperator::create(basis, &up)? + &FockOperator::annihilate(basis, &down)?)
}

/// `Ψ(x_m) = a⁺(J L2(x_m)) + a⁻(J L1(x_m))` on the feature modes.
pub fn psi(basis: &Arc<FockBasis>, model: &GaussianFieldModel, m: usize) -> Result<FockOperator> {
    model.check_point(m)?;
    let d = model.feature_dim();
    let up = feature_vector(basis, model, (0..d).map(|j| model.l2().get(j, m).conj()))?;
    let down = feature_vector(basis, model, (0..d).map(|j| model.l1().get(j, m).conj()))?;
    Ok(&FockOperator::create(basis, &up)? + &FockOperator::annihilate(basis, &down)?)
}

/// `⟨Ψ(x_n)⋯Ψ(x_1) Φ(x_1)⋯Φ(x_n) Ω, Ω⟩`, the Gaussian moment
/// `E[∏ |G(x_i)|²]` of the field, on a feature-only space truncated at `n`.
pub fn field_product_expectation(model: &GaussianFieldModel, points: &[usize]) -> Result<C64> {
    let basis = Arc::new(FockBasis::new(model.feature_dim(), points.len())?);
    let mut v = basis.vacuum();
    for &m in points.iter().rev() {
        v = phi(&basis, model, m)?.apply(&v);
    }
    for &m in points {
        v = psi(&basis, model, m)?.apply(&v);
    }
    Ok(v[0])
}
