use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::FockBasis;
use crate::error::{Error, Result};
use crate::kernels::CellSet;

type Column = Vec<(usize, C64)>;

/// Sparse operator on a truncated Fock space, stored by columns: column `s`
/// lists `(target, amplitude)` pairs sorted by target. Ladder transitions out
/// of the truncated space are dropped.
#[derive(Clone, Debug)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    degree: usize,
    cols: Vec<Column>,
}

fn normalize(mut col: Column) -> Column {
    col.sort_by_key(|&(t, _)| t);
    let mut out: Column = Vec::with_capacity(col.len());
    for (t, a) in col {
        match out.last_mut() {
            Some((last, sum)) if *last == t => *sum += a,
            _ => out.push((t, a)),
        }
    }
    out.retain(|(_, a)| a.re != 0.0 || a.im != 0.0);
    out
}

fn check_len(basis: &FockBasis, v: &[C64]) -> Result<()> {
    if v.len() != basis.modes() {
        return Err(Error::Dimension(format!(
            "one-particle vector of length {} for {} modes",
            v.len(),
            basis.modes()
        )));
    }
    Ok(())
}

impl FockOperator {
    /// `degree` bounds the change in total occupation caused by the operator.
    pub fn from_columns(basis: Arc<FockBasis>, degree: usize, cols: Vec<Column>) -> Self {
        assert_eq!(cols.len(), basis.len(), "one column per basis state");
        let cols = cols.into_iter().map(normalize).collect();
        Self { basis, degree, cols }
    }

    fn build(basis: &Arc<FockBasis>, degree: usize, f: impl Fn(usize) -> Column + Sync) -> Self {
        let cols = (0..basis.len()).into_par_iter().map(|s| normalize(f(s))).collect();
        Self { basis: basis.clone(), degree, cols }
    }

    pub fn zero(basis: &Arc<FockBasis>) -> Self {
        Self { basis: basis.clone(), degree: 0, cols: vec![Vec::new(); basis.len()] }
    }

    pub fn scalar(basis: &Arc<FockBasis>, c: C64) -> Self {
        Self::build(basis, 0, |s| vec![(s, c)])
    }

    pub fn identity(basis: &Arc<FockBasis>) -> Self {
        Self::scalar(basis, C64::new(1.0, 0.0))
    }

    /// `a⁺(g) = Σ_j g_j a⁺_j` with `a⁺_j |…n_j…⟩ = √(n_j+1) |…n_j+1…⟩`.
    pub fn create(basis: &Arc<FockBasis>, g: &[C64]) -> Result<Self> {
        check_len(basis, g)?;
        let b = basis.clone();
        Ok(Self::build(basis, 1, move |s| {
            if b.total(s) >= b.truncation() {
                return Vec::new();
            }
            let mut occ = b.state(s).to_vec();
            let mut col = Vec::new();
            for (j, gj) in g.iter().enumerate() {
                if gj.re == 0.0 && gj.im == 0.0 {
                    continue;
                }
                let n = occ[j];
                occ[j] += 1;
                let t = b.index_of(&occ).expect("state below the cutoff");
                occ[j] = n;
                col.push((t, gj * ((n as f64) + 1.0).sqrt()));
            }
            col
        }))
    }

    /// `a⁻(f) = Σ_j f_j a_j`, so that `[a⁻(f), a⁺(g)] = Σ_j f_j g_j`.
    pub fn annihilate(basis: &Arc<FockBasis>, f: &[C64]) -> Result<Self> {
        check_len(basis, f)?;
        let b = basis.clone();
        Ok(Self::build(basis, 1, move |s| {
            let mut occ = b.state(s).to_vec();
            let mut col = Vec::new();
            for (j, fj) in f.iter().enumerate() {
                let n = occ[j];
                if n == 0 || (fj.re == 0.0 && fj.im == 0.0) {
                    continue;
                }
                occ[j] -= 1;
                let t = b.index_of(&occ).expect("lowered state exists");
                occ[j] = n;
                col.push((t, fj * (n as f64).sqrt()));
            }
            col
        }))
    }

    /// Diagonal operator counting the particles in the listed modes.
    pub fn neutral(basis: &Arc<FockBasis>, cells: &CellSet) -> Result<Self> {
        if let Some(index) = cells.iter().find(|&m| m >= basis.modes()) {
            return Err(Error::Range { index, len: basis.modes() });
        }
        let b = basis.clone();
        Ok(Self::build(basis, 0, move |s| {
            let occ = b.state(s);
            let n: usize = cells.iter().map(|m| occ[m] as usize).sum();
            vec![(s, C64::new(n as f64, 0.0))]
        }))
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, s: usize) -> &[(usize, C64)] {
        &self.cols[s]
    }

    pub fn entry(&self, target: usize, source: usize) -> C64 {
        let col = &self.cols[source];
        match col.binary_search_by_key(&target, |&(t, _)| t) {
            Ok(k) => col[k].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `⟨AΩ, Ω⟩`
    pub fn vacuum_expectation(&self) -> C64 {
        self.entry(0, 0)
    }

    /// Largest change of total occupation over the stored entries.
    pub fn max_transition(&self) -> usize {
        let b = &self.basis;
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(s, col)| col.iter().map(move |&(t, _)| b.total(t).abs_diff(b.total(s))))
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.basis.len(), "vector length must match the basis");
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (s, col) in self.cols.iter().enumerate() {
            let x = v[s];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for &(t, a) in col {
                out[t] += a * x;
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let cols = self
            .cols
            .iter()
            .map(|col| normalize(col.iter().map(|&(t, a)| (t, a * c)).collect()))
            .collect();
        Self { basis: self.basis.clone(), degree: self.degree, cols }
    }

    fn same_basis(&self, other: &Self) {
        assert!(Arc::ptr_eq(&self.basis, &other.basis), "operators on different bases");
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        self.same_basis(other);
        let cols = self
            .cols
            .par_iter()
            .zip(&other.cols)
            .map(|(a, b)| normalize(a.iter().copied().chain(b.iter().map(|&(t, x)| (t, x * sign))).collect()))
            .collect();
        Self { basis: self.basis.clone(), degree: self.degree.max(other.degree), cols }
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        self.same_basis(other);
        let cols = other
            .cols
            .par_iter()
            .map(|col| {
                let mut terms = Vec::new();
                for &(j, b) in col {
                    for &(i, a) in &self.cols[j] {
                        terms.push((i, a * b));
                    }
                }
                normalize(terms)
            })
            .collect();
        Self { basis: self.basis.clone(), degree: self.degree + other.degree, cols }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.compose(other) - &other.compose(self)
    }

    /// Conjugate transpose of the stored matrix.
    pub fn adjoint(&self) -> Self {
        let mut cols: Vec<Column> = vec![Vec::new(); self.basis.len()];
        for (s, col) in self.cols.iter().enumerate() {
            for &(t, a) in col {
                cols[t].push((s, a.conj()));
            }
        }
        Self { basis: self.basis.clone(), degree: self.degree, cols }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.basis.len();
        let mut m = DMatrix::zeros(n, n);
        for (s, col) in self.cols.iter().enumerate() {
            for &(t, a) in col {
                m[(t, s)] = a;
            }
        }
        m
    }

    /// Frobenius norm of the block whose rows and columns are the states with
    /// total occupation at most `max_total`.
    pub fn restricted_norm(&self, max_total: usize) -> f64 {
        let b = &self.basis;
        self.cols
            .iter()
            .enumerate()
            .filter(|&(s, _)| b.total(s) <= max_total)
            .flat_map(|(_, col)| col.iter().filter(|&&(t, _)| b.total(t) <= max_total))
            .fold(0.0, |acc, (_, a)| acc + a.norm_sqr())
            .sqrt()
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        self.compose(rhs)
    }
}

impl Mul<C64> for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: C64) -> FockOperator {
        self.scale(rhs)
    }
}

impl Neg for &FockOperator {
    type Output = FockOperator;
    fn neg(self) -> FockOperator {
        self.scale(C64::new(-1.0, 0.0))
    }
}
