//! Algebraic invariants of the matrix functions on random inputs.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use super::{
    alpha_det, determinant, hafnian_dp, hafnian_enum, permanent, ComplexMatrix, ComplexSymmetricMatrix, Limits,
};
use crate::kernels::permanental_embedding;

fn entry() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn symmetric(max_half: usize) -> impl Strategy<Value = ComplexSymmetricMatrix> {
    (1..=max_half).prop_flat_map(|half| {
        let n = 2 * half;
        prop::collection::vec(entry(), n * n).prop_map(move |v| ComplexSymmetricMatrix::from_upper(n, |i, j| v[i * n + j]))
    })
}

fn square(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max).prop_flat_map(|n| prop::collection::vec(entry(), n * n).prop_map(move |v| ComplexMatrix::new(n, v).unwrap()))
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-10 * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hafnian_algorithms_agree(c in symmetric(5)) {
        let l = Limits::default();
        prop_assert!(close(hafnian_enum(&c, &l).unwrap(), hafnian_dp(&c, &l).unwrap()));
    }

    #[test]
    fn hafnian_is_permutation_invariant(c in symmetric(4), seed in any::<u64>()) {
        let n = c.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let l = Limits::default();
        prop_assert!(close(hafnian_dp(&c.permuted(&perm), &l).unwrap(), hafnian_dp(&c, &l).unwrap()));
    }

    #[test]
    fn hafnian_ignores_the_diagonal(c in symmetric(4), d in entry()) {
        let l = Limits::default();
        let shifted = c.with_diagonal(&vec![d; c.dim()]);
        prop_assert!(close(hafnian_dp(&shifted, &l).unwrap(), hafnian_dp(&c, &l).unwrap()));
    }

    #[test]
    fn hafnian_is_homogeneous(c in symmetric(4), t in 0.1..2.0f64) {
        let l = Limits::default();
        let scaled = ComplexSymmetricMatrix::from_upper(c.dim(), |i, j| c[(i, j)] * t);
        let expected = hafnian_dp(&c, &l).unwrap() * t.powi(c.dim() as i32 / 2);
        prop_assert!(close(hafnian_dp(&scaled, &l).unwrap(), expected));
    }

    #[test]
    fn permanent_is_the_hafnian_of_its_embedding(b in square(5)) {
        let l = Limits::default();
        prop_assert!(close(hafnian_dp(&permanental_embedding(&b), &l).unwrap(), permanent(&b, &l).unwrap()));
    }

    #[test]
    fn alpha_determinant_endpoints(b in square(5)) {
        let l = Limits::default();
        prop_assert!(close(alpha_det(&b, -1.0, &l).unwrap(), determinant(&b)));
        prop_assert!(close(alpha_det(&b, 1.0, &l).unwrap(), permanent(&b, &l).unwrap()));
    }
}
