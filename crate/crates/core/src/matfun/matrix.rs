use std::fmt::Write as _;
use std::ops::Index;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| C64::new(0.0, 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Entries drawn independently from the standard complex normal distribution.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self::from_fn(dim, |_, _| random_entry(rng))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        Ok(Self::from_fn(m.nrows(), |i, j| m[(i, j)]))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Plain-text form: the dimension on the first line, then one row per
    /// line of whitespace-separated `re,im` pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{},{}", z.re, z.im)).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let dim: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension line: {e}")))?;
        let mut entries = Vec::with_capacity(dim * dim);
        for (r, line) in lines.enumerate() {
            if r >= dim {
                return Err(Error::Parse(format!("more than {dim} rows")));
            }
            let before = entries.len();
            for token in line.split_whitespace() {
                entries.push(parse_pair(token)?);
            }
            if entries.len() - before != dim {
                return Err(Error::Dimension(format!(
                    "row {r} has {} entries, expected {dim}",
                    entries.len() - before
                )));
            }
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} rows, expected {dim}",
                entries.len() / dim.max(1)
            )));
        }
        Self::new(dim, entries)
    }
}

fn parse_pair(token: &str) -> Result<C64> {
    let (re, im) = token
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected re,im pair, got {token:?}")))?;
    let re: f64 = re.parse().map_err(|e| Error::Parse(format!("{token:?}: {e}")))?;
    let im: f64 = im.parse().map_err(|e| Error::Parse(format!("{token:?}: {e}")))?;
    Ok(C64::new(re, im))
}

pub(crate) fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

/// Complex matrix with `c[i][j] == c[j][i]` exactly; the argument of a hafnian.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSymmetricMatrix(ComplexMatrix);

impl ComplexSymmetricMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        for i in 0..m.dim() {
            for j in (i + 1)..m.dim() {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::Dimension(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds the matrix from its upper triangle `f(i, j)`, `i <= j`.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        Self(m)
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        Self::from_upper(dim, |_, _| random_entry(rng))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `P C Pᵀ` where row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(ComplexMatrix::from_fn(self.dim(), |i, j| self[(perm[i], perm[j])]))
    }

    pub fn with_diagonal(&self, diag: &[C64]) -> Self {
        let mut m = self.0.clone();
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        Self(m)
    }
}

impl Index<(usize, usize)> for ComplexSymmetricMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}
