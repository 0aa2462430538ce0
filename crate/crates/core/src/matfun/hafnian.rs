use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{check_capacity, Limits, ComplexSymmetricMatrix};
use crate::error::{Error, Result};

fn check_even(c: &ComplexSymmetricMatrix) -> Result<()> {
    if c.dim() % 2 != 0 {
        return Err(Error::Dimension(format!("hafnian of odd dimension {}", c.dim())));
    }
    Ok(())
}

/// Number of perfect pairings of `dim` points, `(dim-1)!!`.
pub fn pairing_count(dim: usize) -> u128 {
    if dim % 2 != 0 {
        return 0;
    }
    (1..dim as u128).step_by(2).product()
}

/// Visits every perfect pairing of `0..dim` once, as a list of `(i, j)` with `i < j`.
pub fn visit_pairings(dim: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    if dim % 2 != 0 {
        return;
    }
    let full = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
    let mut pairs = Vec::with_capacity(dim / 2);
    visit_rec(full, &mut pairs, &mut visit);
}

fn visit_rec(free: u64, pairs: &mut Vec<(usize, usize)>, visit: &mut impl FnMut(&[(usize, usize)])) {
    if free == 0 {
        visit(pairs);
        return;
    }
    let i = free.trailing_zeros() as usize;
    let mut rest = free & !(1 << i);
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        pairs.push((i, j));
        visit_rec(free & !(1 << i) & !(1 << j), pairs, visit);
        pairs.pop();
    }
}

fn enum_rec(c: &ComplexSymmetricMatrix, free: u64, prod: C64) -> C64 {
    if free == 0 {
        return prod;
    }
    let i = free.trailing_zeros() as usize;
    let mut rest = free & !(1 << i);
    let mut acc = C64::new(0.0, 0.0);
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc += enum_rec(c, free & !(1 << i) & !(1 << j), prod * c[(i, j)]);
    }
    acc
}

/// Hafnian as a sum over all perfect pairings.
///
/// The branches pairing index 0 with each `j` run in parallel; their partial
/// sums are added in increasing `j`, so the result does not depend on the
/// number of worker threads.
pub fn hafnian_enum(c: &ComplexSymmetricMatrix, limits: &Limits) -> Result<C64> {
    check_even(c)?;
    check_capacity("hafnian_enum dimension", c.dim(), limits.hafnian_enum)?;
    let dim = c.dim();
    if dim == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let full = (1u64 << dim) - 1;
    let partial: Vec<C64> = (1..dim)
        .into_par_iter()
        .map(|j| enum_rec(c, full & !1 & !(1 << j), c[(0, j)]))
        .collect();
    Ok(partial.into_iter().fold(C64::new(0.0, 0.0), |a, b| a + b))
}

/// Hafnian by memoized recursion over index subsets:
/// `haf(S) = Σ_{j∈S, j≠min S} c[min S][j] · haf(S ∖ {min S, j})`, `haf(∅) = 1`.
pub fn hafnian_dp(c: &ComplexSymmetricMatrix, limits: &Limits) -> Result<C64> {
    check_even(c)?;
    check_capacity("hafnian_dp dimension", c.dim(), limits.hafnian_dp)?;
    let dim = c.dim();
    let full = (1usize << dim) - 1;
    let mut memo = SubsetMemo::new(dim);
    Ok(dp_rec(c, full, &mut memo))
}

struct SubsetMemo {
    values: Vec<C64>,
    known: Vec<u64>,
}

impl SubsetMemo {
    fn new(dim: usize) -> Self {
        let size = 1usize << dim;
        Self {
            values: vec![C64::new(0.0, 0.0); size],
            known: vec![0; size.div_ceil(64)],
        }
    }

    fn get(&self, s: usize) -> Option<C64> {
        (self.known[s / 64] >> (s % 64) & 1 == 1).then(|| self.values[s])
    }

    fn put(&mut self, s: usize, v: C64) {
        self.values[s] = v;
        self.known[s / 64] |= 1 << (s % 64);
    }
}

fn dp_rec(c: &ComplexSymmetricMatrix, s: usize, memo: &mut SubsetMemo) -> C64 {
    if s == 0 {
        return C64::new(1.0, 0.0);
    }
    if let Some(v) = memo.get(s) {
        return v;
    }
    let i = s.trailing_zeros() as usize;
    let mut rest = s & !(1 << i);
    let mut acc = C64::new(0.0, 0.0);
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let sub = dp_rec(c, s & !(1 << i) & !(1 << j), memo);
        acc += c[(i, j)] * sub;
    }
    memo.put(s, acc);
    acc
}
