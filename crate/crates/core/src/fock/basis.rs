use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest basis this crate will enumerate.
pub const MAX_STATES: usize = 500_000;

/// Occupation-number basis of the symmetric Fock space over `ℂ^modes`,
/// truncated to total occupation at most `truncation`. States are ordered by
/// total occupation, then lexicographically; state 0 is the vacuum.
#[derive(Debug)]
pub struct FockBasis {
    modes: usize,
    truncation: usize,
    states: Vec<Vec<u8>>,
    totals: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
}

/// `Σ_{k=0}^{N} C(modes+k−1, k)`, saturating.
pub fn state_count(modes: usize, truncation: usize) -> usize {
    // C(modes + N, N)
    let mut c: u128 = 1;
    for k in 1..=truncation as u128 {
        c = c * (modes as u128 + k) / k;
        if c > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    c as usize
}

fn push_states(modes: usize, remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() == modes - 1 {
        prefix.push(remaining as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for n in (0..=remaining).rev() {
        prefix.push(n as u8);
        push_states(modes, remaining - n, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(modes: usize, truncation: usize) -> Result<Self> {
        let count = state_count(modes, truncation);
        if count > MAX_STATES {
            return Err(Error::Capacity { what: "Fock basis states", size: count, limit: MAX_STATES });
        }
        if truncation > u8::MAX as usize {
            return Err(Error::Capacity { what: "Fock truncation", size: truncation, limit: u8::MAX as usize });
        }
        let mut states = Vec::with_capacity(count);
        if modes == 0 {
            states.push(Vec::new());
        } else {
            for total in 0..=truncation {
                push_states(modes, total, &mut Vec::with_capacity(modes), &mut states);
            }
        }
        let totals = states.iter().map(|s| s.iter().map(|&n| n as usize).sum()).collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { modes, truncation, states, totals, index })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn total(&self, i: usize) -> usize {
        self.totals[i]
    }

    pub fn index_of(&self, occupations: &[u8]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    /// Coefficient vector of the vacuum `Ω`.
    pub fn vacuum(&self) -> Vec<num_complex::Complex64> {
        let mut v = vec![num_complex::Complex64::new(0.0, 0.0); self.len()];
        v[0] = num_complex::Complex64::new(1.0, 0.0);
        v
    }
}
