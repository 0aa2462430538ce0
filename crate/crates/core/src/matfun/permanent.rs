use num_complex::Complex64 as C64;

use super::{check_capacity, ComplexMatrix, Limits};
use crate::error::Result;

/// Ryser's inclusion-exclusion formula, visiting column subsets in Gray-code
/// order so each step updates the row sums by a single column.
pub fn permanent(b: &ComplexMatrix, limits: &Limits) -> Result<C64> {
    let n = b.dim();
    check_capacity("permanent dimension", n, limits.permanent)?;
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut in_set = vec![false; n];
    let mut total = C64::new(0.0, 0.0);
    let mut set_size = 0usize;
    for k in 1u64..(1u64 << n) {
        let col = k.trailing_zeros() as usize;
        if in_set[col] {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= b[(i, col)];
            }
            set_size -= 1;
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += b[(i, col)];
            }
            set_size += 1;
        }
        in_set[col] = !in_set[col];
        let prod: C64 = row_sums.iter().product();
        if set_size % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(if n % 2 == 0 { total } else { -total })
}

/// `Σ_π α^{n−ν(π)} Π_i b[i][π(i)]` with `ν(π)` the number of cycles of `π`.
///
/// Products are first accumulated per cycle count and only then weighted by
/// powers of `alpha`, so `alpha = ±1` reproduce the permanent and determinant
/// without extra rounding.
pub fn alpha_det(b: &ComplexMatrix, alpha: f64, limits: &Limits) -> Result<C64> {
    let n = b.dim();
    check_capacity("alpha_det dimension", n, limits.alpha_det)?;
    let by_cycles = cycle_count_sums(b);
    Ok(by_cycles
        .iter()
        .enumerate()
        .map(|(cycles, &s)| s * alpha.powi((n - cycles) as i32))
        .sum())
}

/// Entry `k` holds the sum of `Π_i b[i][π(i)]` over permutations with `k` cycles.
fn cycle_count_sums(b: &ComplexMatrix) -> Vec<C64> {
    let n = b.dim();
    let mut sums = vec![C64::new(0.0, 0.0); n + 1];
    if n == 0 {
        sums[0] = C64::new(1.0, 0.0);
        return sums;
    }
    let mut perm = vec![0usize; n];
    let mut used = vec![false; n];
    perm_rec(b, 0, C64::new(1.0, 0.0), &mut perm, &mut used, &mut sums);
    sums
}

fn perm_rec(
    b: &ComplexMatrix,
    row: usize,
    prod: C64,
    perm: &mut [usize],
    used: &mut [bool],
    sums: &mut [C64],
) {
    let n = b.dim();
    if row == n {
        sums[cycle_count(perm)] += prod;
        return;
    }
    for col in 0..n {
        if !used[col] {
            used[col] = true;
            perm[row] = col;
            perm_rec(b, row + 1, prod * b[(row, col)], perm, used, sums);
            used[col] = false;
        }
    }
}

pub(crate) fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    cycles
}

/// LU-based determinant.
pub fn determinant(b: &ComplexMatrix) -> C64 {
    if b.dim() == 0 {
        return C64::new(1.0, 0.0);
    }
    b.to_nalgebra().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    /// Σ over all permutations of Π b[i][π(i)], by Heap's algorithm.
    fn naive_permanent(b: &ComplexMatrix) -> C64 {
        let n = b.dim();
        let mut p: Vec<usize> = (0..n).collect();
        let mut total = C64::new(0.0, 0.0);
        let mut counters = vec![0usize; n];
        let term = |p: &[usize]| (0..n).map(|i| b[(i, p[i])]).product::<C64>();
        total += term(&p);
        let mut i = 0;
        while i < n {
            if counters[i] < i {
                if i % 2 == 0 {
                    p.swap(0, i);
                } else {
                    p.swap(counters[i], i);
                }
                total += term(&p);
                counters[i] += 1;
                i = 0;
            } else {
                counters[i] = 0;
                i += 1;
            }
        }
        total
    }

    #[test]
    fn identity_and_all_ones() {
        let l = Limits::default();
        assert_eq!(permanent(&ComplexMatrix::identity(3), &l).unwrap(), c(1.0, 0.0));
        let ones = ComplexMatrix::from_fn(2, |_, _| c(1.0, 0.0));
        assert_eq!(permanent(&ones, &l).unwrap(), c(2.0, 0.0));
        assert_eq!(permanent(&ComplexMatrix::zeros(0), &l).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn ryser_matches_naive_sum_up_to_eight() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let l = Limits::default();
        for n in 1..=8 {
            let b = ComplexMatrix::random(n, &mut rng);
            assert!(rel(permanent(&b, &l).unwrap(), naive_permanent(&b)) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn two_by_two_alpha_det() {
        let (a, b_, cc, d) = (c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0), c(0.7, 0.0));
        let m = ComplexMatrix::new(2, vec![a, b_, cc, d]).unwrap();
        let l = Limits::default();
        for alpha in [-1.0, 0.0, 0.5, 1.0, 2.0, -3.5] {
            let expect = a * d + b_ * cc * alpha;
            assert!(rel(alpha_det(&m, alpha, &l).unwrap(), expect) < 1e-14);
        }
    }

    #[test]
    fn alpha_specializations_on_random_five_by_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let l = Limits::default();
        for _ in 0..4 {
            let b = ComplexMatrix::random(5, &mut rng);
            assert!(rel(alpha_det(&b, -1.0, &l).unwrap(), determinant(&b)) < 1e-10);
            assert!(rel(alpha_det(&b, 1.0, &l).unwrap(), permanent(&b, &l).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn permanent_matches_alpha_one_on_six_by_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = ComplexMatrix::random(6, &mut rng);
        let l = Limits::default();
        assert!(rel(permanent(&b, &l).unwrap(), alpha_det(&b, 1.0, &l).unwrap()) < 1e-10);
    }

    #[test]
    fn capacity_limits_apply() {
        let l = Limits { permanent: 3, alpha_det: 3, ..Limits::default() };
        let b = ComplexMatrix::identity(4);
        assert!(permanent(&b, &l).is_err());
        assert!(alpha_det(&b, 1.0, &l).is_err());
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(cycle_count(&[0, 1, 2]), 3);
        assert_eq!(cycle_count(&[1, 0, 2]), 2);
        assert_eq!(cycle_count(&[1, 2, 0]), 1);
        assert_eq!(cycle_count(&[]), 0);
    }
}
