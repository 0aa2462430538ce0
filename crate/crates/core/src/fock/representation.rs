use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::{FockBasis, FockOperator};
use crate::error::{Error, Result};
use crate::kernels::{CellSet, GaussianFieldModel, IntensityProfile};
use crate::matfun::ComplexMatrix;

/// Default bound on the number of factors in a Wick polynomial.
pub const DEFAULT_WICK_ORDER: usize = 4;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepresentationKind {
    /// Grid modes followed by feature modes; vacuum moments of `ρ` are those
    /// of the Cox process driven by `|G|²`.
    Cox,
    /// Grid modes shifted by `λ`; vacuum moments are those of the Poisson process.
    Poisson,
    /// `A⁺(h) = a⁺(K2 h) + a⁻(K1 h)` on `ℂ^n` with unit weights.
    Bogoliubov,
}

/// Pointwise CCR operators `A⁺(x_m)`, `A⁻(x_m)` on a truncated Fock space,
/// with the cell volumes `vol_m` of the reference measure. Smeared operators
/// are `A^±(h) = Σ_m vol_m h_m A^±(x_m)`.
#[derive(Clone, Debug)]
pub struct CcrRepresentation {
    kind: RepresentationKind,
    basis: Arc<FockBasis>,
    volumes: Vec<f64>,
    plus: Vec<FockOperator>,
    minus: Vec<FockOperator>,
}

fn embed(modes: usize, offset: usize, v: impl IntoIterator<Item = C64>) -> Vec<C64> {
    let mut out = vec![ZERO; modes];
    for (k, z) in v.into_iter().enumerate() {
        out[offset + k] = z;
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl CcrRepresentation {
    /// `A⁺(x_m) = a₁⁺(e_m)/√vol_m + a₂⁺(J L2(x_m)) + a₂⁻(J L1(x_m))` and
    /// `A⁻(x_m) = a₁⁻(e_m)/√vol_m + a₂⁺(L1(x_m)) + a₂⁻(L2(x_m))`.
    pub fn cox(model: &GaussianFieldModel, truncation: usize) -> Result<Self> {
        let (m_cells, d) = (model.cells(), model.feature_dim());
        let modes = m_cells + d;
        let basis = Arc::new(FockBasis::new(modes, truncation)?);
        let volumes = model.grid().volumes().to_vec();
        let (l1, l2) = (model.l1(), model.l2());
        let mut plus = Vec::with_capacity(m_cells);
        let mut minus = Vec::with_capacity(m_cells);
        for m in 0..m_cells {
            let s = 1.0 / volumes[m].sqrt();
            let mut up = embed(modes, m_cells, (0..d).map(|j| l2.get(j, m).conj()));
            up[m] = C64::new(s, 0.0);
            let down = embed(modes, m_cells, (0..d).map(|j| l1.get(j, m).conj()));
            plus.push(&FockOperator::create(&basis, &up)? + &FockOperator::annihilate(&basis, &down)?);

            let mut low = embed(modes, m_cells, (0..d).map(|j| l2.get(j, m)));
            low[m] = C64::new(s, 0.0);
            let raise = embed(modes, m_cells, (0..d).map(|j| l1.get(j, m)));
            minus.push(&FockOperator::annihilate(&basis, &low)? + &FockOperator::create(&basis, &raise)?);
        }
        Ok(Self { kind: RepresentationKind::Cox, basis, volumes, plus, minus })
    }

    /// `A⁺(x_m) = a⁺(e_m)/√vol_m + conj λ_m`, `A⁻(x_m) = a⁻(e_m)/√vol_m + λ_m`
    /// on the grid modes alone.
    pub fn poisson(profile: &IntensityProfile, truncation: usize) -> Result<Self> {
        let modes = profile.grid().cells();
        let basis = Arc::new(FockBasis::new(modes, truncation)?);
        let volumes = profile.grid().volumes().to_vec();
        let mut plus = Vec::with_capacity(modes);
        let mut minus = Vec::with_capacity(modes);
        for (m, &lambda) in profile.lambda().iter().enumerate() {
            let e = embed(modes, m, [C64::new(1.0 / volumes[m].sqrt(), 0.0)]);
            plus.push(&FockOperator::create(&basis, &e)? + &FockOperator::scalar(&basis, lambda.conj()));
            minus.push(&FockOperator::annihilate(&basis, &e)? + &FockOperator::scalar(&basis, lambda));
        }
        Ok(Self { kind: RepresentationKind::Poisson, basis, volumes, plus, minus })
    }

    /// `A⁺(e_i) = a⁺(K2 e_i) + a⁻(K1 e_i)`, `A⁻(e_i) = a⁻(K2' e_i) + a⁺(K1' e_i)`
    /// with `K'` the entrywise conjugate; every weight is 1.
    pub fn bogoliubov(k1: &ComplexMatrix, k2: &ComplexMatrix, truncation: usize) -> Result<Self> {
        let n = k1.dim();
        if k2.dim() != n {
            return Err(Error::Dimension(format!("K1 is {n}x{n}, K2 is {0}x{0}", k2.dim())));
        }
        let basis = Arc::new(FockBasis::new(n, truncation)?);
        let col = |k: &ComplexMatrix, i: usize, conj: bool| -> Vec<C64> {
            (0..n).map(|r| if conj { k[(r, i)].conj() } else { k[(r, i)] }).collect()
        };
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        for i in 0..n {
            plus.push(&FockOperator::create(&basis, &col(k2, i, false))? + &FockOperator::annihilate(&basis, &col(k1, i, false))?);
            minus.push(&FockOperator::annihilate(&basis, &col(k2, i, true))? + &FockOperator::create(&basis, &col(k1, i, true))?);
        }
        Ok(Self { kind: RepresentationKind::Bogoliubov, basis, volumes: vec![1.0; n], plus, minus })
    }

    pub fn kind(&self) -> RepresentationKind {
        self.kind
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn truncation(&self) -> usize {
        self.basis.truncation()
    }

    /// Number of points `x_m`.
    pub fn points(&self) -> usize {
        self.plus.len()
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn a_plus(&self, m: usize) -> &FockOperator {
        &self.plus[m]
    }

    pub fn a_minus(&self, m: usize) -> &FockOperator {
        &self.minus[m]
    }

    fn check_function(&self, h: &[C64]) -> Result<()> {
        if h.len() != self.points() {
            return Err(Error::Dimension(format!("test function of length {} for {} points", h.len(), self.points())));
        }
        Ok(())
    }

    fn check_cells(&self, cells: &CellSet) -> Result<()> {
        match cells.iter().find(|&m| m >= self.points()) {
            Some(index) => Err(Error::Range { index, len: self.points() }),
            None => Ok(()),
        }
    }

    fn smeared(&self, ops: &[FockOperator], h: &[C64]) -> Result<FockOperator> {
        self.check_function(h)?;
        let mut out = FockOperator::zero(&self.basis);
        for (m, op) in ops.iter().enumerate() {
            if h[m] != ZERO {
                out = &out + &op.scale(h[m] * self.volumes[m]);
            }
        }
        Ok(out)
    }

    pub fn smeared_plus(&self, h: &[C64]) -> Result<FockOperator> {
        self.smeared(&self.plus, h)
    }

    pub fn smeared_minus(&self, h: &[C64]) -> Result<FockOperator> {
        self.smeared(&self.minus, h)
    }

    /// The Hermitian field `B(h) = A⁺(h) + A⁻(Jh)`.
    pub fn field_b(&self, h: &[C64]) -> Result<FockOperator> {
        let conj: Vec<C64> = h.iter().map(|z| z.conj()).collect();
        Ok(&self.smeared_plus(h)? + &self.smeared_minus(&conj)?)
    }

    fn apply_b(&self, h: &[C64], v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for m in 0..self.points() {
            if h[m] == ZERO {
                continue;
            }
            let w = h[m] * self.volumes[m];
            for (o, (p, q)) in out.iter_mut().zip(self.plus[m].apply(v).into_iter().zip(self.minus[m].apply(v))) {
                *o += w * p + w.conj() * q;
            }
        }
        out
    }

    /// `τ(B(h)) = ⟨B(h)Ω, Ω⟩`
    pub fn t1(&self, h: &[C64]) -> Result<C64> {
        self.check_function(h)?;
        Ok(self.apply_b(h, &self.basis.vacuum())[0])
    }

    /// `T⁽ᵏ⁾(h_1..h_k) = τ((B(h_1) − T⁽¹⁾(h_1)) ⋯ (B(h_k) − T⁽¹⁾(h_k)))`, and
    /// `T⁽¹⁾` itself for a single function.
    pub fn quasifree_t(&self, hs: &[Vec<C64>]) -> Result<C64> {
        if hs.len() > self.truncation() {
            return Err(Error::Capacity { what: "Fock truncation for T functions", size: hs.len(), limit: self.truncation() });
        }
        if hs.len() == 1 {
            return self.t1(&hs[0]);
        }
        let means = hs.iter().map(|h| self.t1(h)).collect::<Result<Vec<_>>>()?;
        let mut v = self.basis.vacuum();
        for (h, t) in hs.iter().zip(&means).rev() {
            let bv = self.apply_b(h, &v);
            v = bv.into_iter().zip(&v).map(|(b, x)| b - t * x).collect();
        }
        Ok(v[0])
    }

    /// `ρ(Δ) = Σ_{m∈Δ} vol_m A⁺(x_m) A⁻(x_m)`
    pub fn density(&self, cells: &CellSet) -> Result<FockOperator> {
        self.check_cells(cells)?;
        let mut out = FockOperator::zero(&self.basis);
        for m in cells.iter() {
            let term = (&self.plus[m] * &self.minus[m]).scale(C64::new(self.volumes[m], 0.0));
            out = &out + &term;
        }
        Ok(out)
    }

    /// `ρ(Δ) v` without forming the operator.
    pub fn apply_density(&self, cells: &CellSet, v: &[C64]) -> Result<Vec<C64>> {
        self.check_cells(cells)?;
        let mut out = vec![ZERO; v.len()];
        for m in cells.iter() {
            let w = self.plus[m].apply(&self.minus[m].apply(v));
            for (o, x) in out.iter_mut().zip(w) {
                *o += x * self.volumes[m];
            }
        }
        Ok(out)
    }

    fn require_truncation(&self, n: usize) -> Result<()> {
        if self.truncation() < 2 * n {
            return Err(Error::Capacity { what: "Fock truncation (twice the order)", size: 2 * n, limit: self.truncation() });
        }
        Ok(())
    }

    fn check_boxes(&self, boxes: &[CellSet], max_order: usize) -> Result<()> {
        if boxes.len() > max_order {
            return Err(Error::Capacity { what: "Wick polynomial order", size: boxes.len(), limit: max_order });
        }
        self.require_truncation(boxes.len())?;
        boxes.iter().try_for_each(|b| self.check_cells(b))
    }

    /// `:ρ(Δ_1)⋯ρ(Δ_n):` by the recursion
    /// `:ρ_1⋯ρ_{n+1}: = ρ_{n+1} :ρ_1⋯ρ_n: − Σ_i :ρ_1⋯ρ(Δ_i ∩ Δ_{n+1})⋯ρ_n:`.
    pub fn wick(&self, boxes: &[CellSet], max_order: usize) -> Result<FockOperator> {
        self.check_boxes(boxes, max_order)?;
        let mut cache = HashMap::new();
        self.wick_rec(boxes, &mut cache)
    }

    fn wick_rec(&self, boxes: &[CellSet], cache: &mut HashMap<CellSet, FockOperator>) -> Result<FockOperator> {
        let Some((last, rest)) = boxes.split_last() else {
            return Ok(FockOperator::identity(&self.basis));
        };
        if boxes.iter().any(CellSet::is_empty) {
            return Ok(FockOperator::zero(&self.basis));
        }
        if !cache.contains_key(last) {
            cache.insert(last.clone(), self.density(last)?);
        }
        let inner = self.wick_rec(rest, cache)?;
        let mut out = &cache[last] * &inner;
        for i in 0..rest.len() {
            let mut reduced = rest.to_vec();
            reduced[i] = rest[i].intersection(last);
            if !reduced[i].is_empty() {
                out = &out - &self.wick_rec(&reduced, cache)?;
            }
        }
        Ok(out)
    }

    fn wick_vacuum_rec(&self, boxes: &[CellSet]) -> Result<Vec<C64>> {
        let Some((last, rest)) = boxes.split_last() else {
            return Ok(self.basis.vacuum());
        };
        if boxes.iter().any(CellSet::is_empty) {
            return Ok(vec![ZERO; self.basis.len()]);
        }
        let mut out = self.apply_density(last, &self.wick_vacuum_rec(rest)?)?;
        for i in 0..rest.len() {
            let mut reduced = rest.to_vec();
            reduced[i] = rest[i].intersection(last);
            if !reduced[i].is_empty() {
                for (o, x) in out.iter_mut().zip(self.wick_vacuum_rec(&reduced)?) {
                    *o -= x;
                }
            }
        }
        Ok(out)
    }

    /// `θ⁽ⁿ⁾(Δ_1×⋯×Δ_n) = τ(:ρ(Δ_1)⋯ρ(Δ_n):)/n!`, evaluated on the vacuum vector.
    pub fn theta(&self, boxes: &[CellSet]) -> Result<C64> {
        self.check_boxes(boxes, DEFAULT_WICK_ORDER)?;
        Ok(self.wick_vacuum_rec(boxes)?[0] / factorial(boxes.len()))
    }

    /// `τ(ρ(Δ_1)⋯ρ(Δ_n))`
    pub fn moment(&self, boxes: &[CellSet]) -> Result<C64> {
        self.require_truncation(boxes.len())?;
        let mut v = self.basis.vacuum();
        for b in boxes.iter().rev() {
            v = self.apply_density(b, &v)?;
        }
        Ok(v[0])
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::kernels::{builtin_model, BuiltinParams, Grid};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn demo(name: &str, cells: usize, n: usize) -> (GaussianFieldModel, CcrRepresentation) {
        let model = builtin_model(name, Grid::unit_interval(cells).unwrap(), &BuiltinParams::default()).unwrap();
        let rep = CcrRepresentation::cox(&model, n).unwrap();
        (model, rep)
    }

    fn random_fn(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    #[test]
    fn zero_model_gives_grid_ladders() {
        let model = GaussianFieldModel::zero(Grid::unit_interval(2).unwrap());
        let rep = CcrRepresentation::cox(&model, 3).unwrap();
        let b = rep.basis();
        let mut e = vec![c(0.0, 0.0); b.modes()];
        e[1] = c(2.0f64.sqrt(), 0.0);
        let diff = rep.a_plus(1) - &FockOperator::create(b, &e).unwrap();
        assert!(diff.restricted_norm(3) < 1e-14);
        let rho = rep.density(&CellSet::single(0)).unwrap();
        assert!((&rho - &FockOperator::neutral(b, &CellSet::single(0)).unwrap()).restricted_norm(3) < 1e-15);
    }

    #[test]
    fn a_minus_is_adjoint_of_a_plus() {
        let (_, rep) = demo("alpha-beta-demo", 3, 4);
        for m in 0..3 {
            let diff = &rep.a_plus(m).adjoint() - rep.a_minus(m);
            assert_eq!(diff.restricted_norm(4), 0.0);
        }
    }

    #[test]
    fn pointwise_ccr_on_safe_states() {
        for name in crate::kernels::BUILTIN_MODELS {
            let (model, rep) = demo(name, 3, 4);
            for a in 0..3 {
                for b in 0..3 {
                    let delta = if a == b { 1.0 / model.grid().volume(a) } else { 0.0 };
                    let comm = rep.a_minus(a).commutator(rep.a_plus(b));
                    let res = (&comm - &FockOperator::scalar(rep.basis(), c(delta, 0.0))).restricted_norm(3);
                    assert!(res < 1e-12, "{name} ({a},{b}): {res}");
                    assert!(rep.a_plus(a).commutator(rep.a_plus(b)).restricted_norm(3) < 1e-12);
                    assert!(rep.a_minus(a).commutator(rep.a_minus(b)).restricted_norm(3) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn one_point_vacuum_moment() {
        let (model, rep) = demo("alpha-beta-demo", 3, 2);
        for m in 0..3 {
            let v = (rep.a_plus(m) * rep.a_minus(m)).vacuum_expectation() * model.grid().volume(m);
            assert!((v - model.k1()[(m, m)] * model.grid().volume(m)).norm() < 1e-14);
        }
    }

    #[test]
    fn density_is_hermitian_and_commuting() {
        let (_, rep) = demo("alpha-beta-demo", 3, 6);
        let r1 = rep.density(&CellSet::new([0, 1])).unwrap();
        let r2 = rep.density(&CellSet::new([1, 2])).unwrap();
        assert!((&r1 - &r1.adjoint()).restricted_norm(4) <= 1e-13);
        assert!(r1.commutator(&r2).restricted_norm(4) <= 1e-10);
        assert!(r1.max_transition() <= 2);
    }

    #[test]
    fn poisson_density_closed_form() {
        let grid = Grid::unit_interval(3).unwrap();
        let lambda = vec![c(1.0, 0.5), c(0.0, 0.0), c(-0.7, 1.1)];
        let profile = IntensityProfile::new(grid.clone(), lambda.clone()).unwrap();
        let rep = CcrRepresentation::poisson(&profile, 4).unwrap();
        let cells = CellSet::new([0, 2]);
        let b = rep.basis();
        let g: Vec<C64> = (0..3)
            .map(|m| if cells.contains(m) { lambda[m] * grid.volume(m).sqrt() } else { c(0.0, 0.0) })
            .collect();
        let gbar: Vec<C64> = g.iter().map(|z| z.conj()).collect();
        let closed = &(&(&FockOperator::create(b, &g).unwrap() + &FockOperator::annihilate(b, &gbar).unwrap())
            + &FockOperator::neutral(b, &cells).unwrap())
            + &FockOperator::scalar(b, c(profile.mass(&cells), 0.0));
        let rho = rep.density(&cells).unwrap();
        assert!((&rho - &closed).restricted_norm(3) < 1e-13);
        assert!((rep.moment(&[cells.clone()]).unwrap() - profile.mass(&cells)).norm() < 1e-13);
        let zero = CcrRepresentation::poisson(&IntensityProfile::constant(grid, c(0.0, 0.0)).unwrap(), 2).unwrap();
        assert_eq!((&zero.density(&cells).unwrap() - &FockOperator::neutral(zero.basis(), &cells).unwrap()).nnz(), 0);
    }

    #[test]
    fn poisson_unit_intensity_mean() {
        let profile = IntensityProfile::constant(Grid::unit_interval(4).unwrap(), c(1.0, 0.0)).unwrap();
        let rep = CcrRepresentation::poisson(&profile, 2).unwrap();
        assert!((rep.moment(&[CellSet::new(0..4)]).unwrap() - 1.0).norm() < 1e-13);
    }

    #[test]
    fn wick_basic_forms() {
        let (_, rep) = demo("real-gauss", 3, 4);
        let (a, b) = (CellSet::new([0]), CellSet::new([1, 2]));
        let w1 = rep.wick(&[a.clone()], 4).unwrap();
        assert_eq!((&w1 - &rep.density(&a).unwrap()).nnz(), 0);
        let w2 = rep.wick(&[a.clone(), b.clone()], 4).unwrap();
        let prod = &rep.density(&b).unwrap() * &rep.density(&a).unwrap();
        assert_eq!((&w2 - &prod).nnz(), 0);
        assert!(matches!(rep.wick(&[a.clone(), b.clone(), a.clone()], 4), Err(Error::Capacity { .. })));
        assert!(matches!(rep.wick(&[a.clone(), b.clone()], 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn wick_is_symmetric_and_both_routes_agree() {
        let (_, rep) = demo("alpha-beta-demo", 3, 6);
        let boxes = [CellSet::new([0, 1]), CellSet::new([1, 2]), CellSet::new([0, 2])];
        let w = rep.wick(&boxes, 4).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            let permuted: Vec<CellSet> = perm.iter().map(|&i| boxes[i].clone()).collect();
            let wp = rep.wick(&permuted, 4).unwrap();
            // three densities make six ladder steps: exact on states up to N − 3
            assert!((&w - &wp).restricted_norm(3) <= 1e-12 * (1.0 + w.restricted_norm(3)));
        }
        let theta = rep.theta(&boxes).unwrap();
        assert!((w.vacuum_expectation() / 6.0 - theta).norm() < 1e-13);
    }

    #[test]
    fn wick_reordering_at_order_two() {
        let (_, rep) = demo("alpha-beta-demo", 4, 4);
        let (a, b) = (CellSet::new([0, 1, 2]), CellSet::new([1, 2, 3]));
        let plain = rep.moment(&[a.clone(), b.clone()]).unwrap();
        let wick = rep.theta(&[a.clone(), b.clone()]).unwrap() * 2.0;
        let overlap = rep.moment(&[a.intersection(&b)]).unwrap();
        assert!((plain - wick - overlap).norm() < 1e-10);
    }

    #[test]
    fn truncation_beyond_twice_the_order_changes_nothing() {
        let model = builtin_model("alpha-beta-demo", Grid::unit_interval(3).unwrap(), &BuiltinParams::default()).unwrap();
        let boxes = [CellSet::new([0, 1]), CellSet::new([2]), CellSet::new([1])];
        let low = CcrRepresentation::cox(&model, 6).unwrap();
        let high = CcrRepresentation::cox(&model, 8).unwrap();
        assert!((low.moment(&boxes).unwrap() - high.moment(&boxes).unwrap()).norm() < 1e-12);
        assert!((low.theta(&boxes).unwrap() - high.theta(&boxes).unwrap()).norm() < 1e-12);
        assert!(matches!(CcrRepresentation::cox(&model, 5).unwrap().moment(&boxes), Err(Error::Capacity { .. })));
    }

    #[test]
    fn moment_variance_is_nonnegative() {
        let (_, rep) = demo("proper-fourier", 3, 4);
        let d = CellSet::new([0, 2]);
        let m1 = rep.moment(&[d.clone()]).unwrap().re;
        let m2 = rep.moment(&[d.clone(), d]).unwrap().re;
        assert!(m2 >= m1 * m1);
    }

    #[test]
    fn field_commutator_is_imaginary_part() {
        let (model, rep) = demo("alpha-beta-demo", 3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..3 {
            let f = random_fn(&mut rng, 3);
            let h = random_fn(&mut rng, 3);
            let inner: C64 = (0..3).map(|m| h[m] * f[m].conj() * model.grid().volume(m)).sum();
            let comm = rep.field_b(&f).unwrap().commutator(&rep.field_b(&h).unwrap());
            let target = FockOperator::scalar(rep.basis(), c(0.0, 2.0 * inner.im));
            assert!((&comm - &target).restricted_norm(3) < 1e-10);
            let bf = rep.field_b(&f).unwrap();
            assert!((&bf - &bf.adjoint()).restricted_norm(4) < 1e-14);
        }
    }

    #[test]
    fn t_functions_of_cox_representation() {
        let (model, rep) = demo("alpha-beta-demo", 3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let hs: Vec<Vec<C64>> = (0..4).map(|_| random_fn(&mut rng, 3)).collect();
        assert!(rep.t1(&hs[0]).unwrap().norm() < 1e-14);
        assert!(rep.quasifree_t(&hs[..3]).unwrap().norm() < 1e-10);

        // the closed form of the two-point function, written out from K1, K2
        let vol = model.grid().volumes();
        let t2 = |f: &[C64], h: &[C64]| -> C64 {
            let mut s: C64 = (0..3).map(|x| f[x].conj() * h[x] * vol[x]).sum();
            for x in 0..3 {
                for y in 0..3 {
                    let z = f[x] * h[y] * model.k2()[(x, y)].conj() + f[x].conj() * h[y] * model.k1()[(x, y)];
                    s += 2.0 * z.re * vol[x] * vol[y];
                }
            }
            s
        };
        for i in 0..4 {
            for j in 0..4 {
                let t = rep.quasifree_t(&[hs[i].clone(), hs[j].clone()]).unwrap();
                assert!((t - t2(&hs[i], &hs[j])).norm() < 1e-12, "({i},{j})");
            }
        }
        let four = rep.quasifree_t(&hs).unwrap();
        let pairs = t2(&hs[0], &hs[1]) * t2(&hs[2], &hs[3])
            + t2(&hs[0], &hs[2]) * t2(&hs[1], &hs[3])
            + t2(&hs[0], &hs[3]) * t2(&hs[1], &hs[2]);
        assert!((four - pairs).norm() < 1e-9);
        assert!(matches!(rep.quasifree_t(&vec![hs[0].clone(); 5]), Err(Error::Capacity { .. })));
    }

    #[test]
    fn poisson_t_functions_are_shifted() {
        let grid = Grid::unit_interval(3).unwrap();
        let lambda = vec![c(1.0, 0.5), c(0.2, 0.0), c(-0.7, 1.1)];
        let rep = CcrRepresentation::poisson(&IntensityProfile::new(grid.clone(), lambda.clone()).unwrap(), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let hs: Vec<Vec<C64>> = (0..4).map(|_| random_fn(&mut rng, 3)).collect();
        let t1: C64 = (0..3).map(|m| (hs[0][m] * lambda[m].conj() + hs[0][m].conj() * lambda[m]) * grid.volume(m)).sum();
        assert!((rep.t1(&hs[0]).unwrap() - t1).norm() < 1e-14);
        assert!(rep.quasifree_t(&hs[..3]).unwrap().norm() < 1e-10);
        let t2 = |f: &[C64], h: &[C64]| -> C64 { (0..3).map(|m| f[m].conj() * h[m] * grid.volume(m)).sum() };
        let four = rep.quasifree_t(&hs).unwrap();
        let pairs = t2(&hs[0], &hs[1]) * t2(&hs[2], &hs[3])
            + t2(&hs[0], &hs[2]) * t2(&hs[1], &hs[3])
            + t2(&hs[0], &hs[3]) * t2(&hs[1], &hs[2]);
        assert!((four - pairs).norm() < 1e-9);
    }
}
