use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::CcrRepresentation;
use crate::error::{Error, Result};
use crate::matfun::ComplexMatrix;
use crate::report::CheckRecord;

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `(1 + K1* K1)^{1/2}`, by Hermitian eigendecomposition.
pub fn bogoliubov_partner(k1: &ComplexMatrix) -> ComplexMatrix {
    let k = k1.to_nalgebra();
    let n = k.nrows();
    let gram = DMatrix::identity(n, n) + k.adjoint() * &k;
    let eig = gram.symmetric_eigen();
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    let root = &eig.eigenvectors * roots * eig.eigenvectors.adjoint();
    ComplexMatrix::from_nalgebra(&root).expect("square by construction")
}

/// `T⁽²⁾(f, h) = ((K1 + J K2) f, (K1 + J K2) h)`.
pub fn bogoliubov_two_point(k1: &ComplexMatrix, k2: &ComplexMatrix, f: &[C64], h: &[C64]) -> C64 {
    let (a, b) = (k1.to_nalgebra(), k2.to_nalgebra());
    let map = |v: &[C64]| {
        let v = nalgebra::DVector::from_column_slice(v);
        &a * &v + (&b * &v).map(|z| z.conj())
    };
    let (u, w) = (map(f), map(h));
    u.iter().zip(w.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Residuals of `(K2')* K1 − (K1')* K2 = 0` and `K2* K2 − K1* K1 = 1`
/// (`K'` the entrywise conjugate), in spectral norm. When both hold, the
/// two-point functions of the induced representation are compared with the
/// closed form for each ordered pair of test functions (basis vectors when
/// none are given).
pub fn bogoliubov_check(
    k1: &ComplexMatrix,
    k2: &ComplexMatrix,
    truncation: usize,
    test_functions: &[Vec<C64>],
) -> Result<Vec<CheckRecord>> {
    let n = k1.dim();
    if k2.dim() != n || test_functions.iter().any(|f| f.len() != n) {
        return Err(Error::Dimension("K1, K2 and the test functions must share one dimension".into()));
    }
    let (a, b) = (k1.to_nalgebra(), k2.to_nalgebra());
    let symmetry = b.transpose() * &a - a.transpose() * &b;
    let unitarity = b.adjoint() * &b - a.adjoint() * &a - DMatrix::identity(n, n);
    let scale = 1.0 + spectral_norm(&b).powi(2);
    let tol = 1e-10 * scale;
    let mut records = vec![
        CheckRecord::new("bogoliubov symmetry condition", spectral_norm(&symmetry), tol),
        CheckRecord::new("bogoliubov unitarity condition", spectral_norm(&unitarity), tol),
    ];
    if !records.iter().all(|r| r.pass) {
        return Ok(records);
    }
    let defaults: Vec<Vec<C64>>;
    let functions = if test_functions.is_empty() {
        defaults = (0..n)
            .map(|i| (0..n).map(|k| C64::new(if k == i { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        &defaults
    } else {
        test_functions
    };
    let rep = CcrRepresentation::bogoliubov(k1, k2, truncation.max(2))?;
    for (i, f) in functions.iter().enumerate() {
        for (j, h) in functions.iter().enumerate() {
            let fock = rep.quasifree_t(&[f.clone(), h.clone()])?;
            let closed = bogoliubov_two_point(k1, k2, f, h);
            records.push(CheckRecord::new(format!("bogoliubov two-point function ({i},{j})"), (fock - closed).norm(), tol));
        }
    }
    Ok(records)
}
