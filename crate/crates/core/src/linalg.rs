//! Dense symmetric matrices, Cholesky factors and column partitioning.
//!
//! Indices are zero-based throughout. Storage is a full row-major buffer
//! kept symmetric by every mutator, so reads never need to branch on the
//! triangle.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible Cholesky pivot. A matrix is treated as positive
/// definite iff every pivot of its factorization exceeds this value.
pub const PD_PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "symmetric matrix needs dim >= 1");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from full rows, rejecting ragged or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if j >= i {
                    if v != rows[j][i] {
                        return Err(Error::Shape(format!("entry ({i},{j}) is not symmetric")));
                    }
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    /// Packs row-major upper triangle entries `(0,0), (0,1), .., (p-1,p-1)`.
    pub fn from_upper_triangle(dim: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(Error::Shape(format!(
                "upper triangle of dim {dim} needs {} values, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        let mut it = upper.iter();
        Ok(Self::from_fn(dim, |_, _| *it.next().unwrap()))
    }

    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim * (self.dim + 1) / 2);
        for i in 0..self.dim {
            out.extend_from_slice(&self.data[i * self.dim + i..(i + 1) * self.dim]);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// Full row-major buffer.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "dimension {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Matrix L1 norm: the largest absolute column sum.
    pub fn l1_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    /// Converts a square nalgebra matrix, averaging the two triangles.
    pub fn from_nalgebra(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        Ok(Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        CholeskyFactor::new(self)
    }

    pub fn is_positive_definite(&self) -> bool {
        let mut buf = self.data.clone();
        cholesky_in_place(&mut buf, self.dim)
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(self.cholesky()?.inverse())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .to_nalgebra()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Splits off row/column `k`.
    pub fn partition(&self, k: usize) -> Result<PartitionView> {
        let p = self.dim;
        if k >= p {
            return Err(Error::Index { index: k, dim: p });
        }
        if p == 1 {
            return Ok(PartitionView {
                block11: None,
                vec12: Vec::new(),
                scalar22: self.get(0, 0),
            });
        }
        let others: Vec<usize> = (0..p).filter(|&j| j != k).collect();
        let block11 = Self::from_fn(p - 1, |a, b| self.get(others[a], others[b]));
        let vec12 = others.iter().map(|&j| self.get(j, k)).collect();
        Ok(PartitionView {
            block11: Some(block11),
            vec12,
            scalar22: self.get(k, k),
        })
    }

    /// Inverse of [`partition`](Self::partition): reinserts the split column at `k`.
    pub fn reassemble(view: &PartitionView, k: usize) -> Result<Self> {
        let p = view.vec12.len() + 1;
        if k >= p {
            return Err(Error::Index { index: k, dim: p });
        }
        let mut m = Self::zeros(p);
        m.set(k, k, view.scalar22);
        if let Some(block) = &view.block11 {
            if block.dim() != p - 1 {
                return Err(Error::Shape("block11 and vec12 disagree".into()));
            }
            let others: Vec<usize> = (0..p).filter(|&j| j != k).collect();
            for a in 0..p - 1 {
                m.set(others[a], k, view.vec12[a]);
                for b in a..p - 1 {
                    m.set(others[a], others[b], block.get(a, b));
                }
            }
        }
        Ok(m)
    }

    /// Partial correlations `-w_ij / sqrt(w_ii w_jj)`, unit diagonal.
    pub fn partial_correlations(&self) -> Result<Self> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(partial_correlations_unchecked(self))
    }
}

/// Partial correlations without the PD check; the caller guarantees a
/// positive diagonal.
pub(crate) fn partial_correlations_unchecked(omega: &SymmetricMatrix) -> SymmetricMatrix {
    let d: Vec<f64> = omega.diagonal().iter().map(|v| v.sqrt()).collect();
    SymmetricMatrix::from_fn(omega.dim(), |i, j| {
        if i == j {
            1.0
        } else {
            -omega.get(i, j) / (d[i] * d[j])
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionView {
    /// `None` only when the source matrix is 1x1.
    pub block11: Option<SymmetricMatrix>,
    pub vec12: Vec<f64>,
    pub scalar22: f64,
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn new(m: &SymmetricMatrix) -> Result<Self> {
        let mut lower = m.as_slice().to_vec();
        if !cholesky_in_place(&mut lower, m.dim()) {
            return Err(Error::NotPositiveDefinite);
        }
        for i in 0..m.dim() {
            for j in i + 1..m.dim() {
                lower[i * m.dim() + j] = 0.0;
            }
        }
        Ok(Self { dim: m.dim(), lower })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    /// Solves `L x = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        forward_sub(&self.lower, self.dim, b);
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        backward_sub_transposed(&self.lower, self.dim, b);
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower_in_place(&mut x);
        self.solve_upper_in_place(&mut x);
        x
    }

    pub fn inverse(&self) -> SymmetricMatrix {
        let mut out = vec![0.0; self.dim * self.dim];
        invert_from_cholesky(&self.lower, self.dim, &mut out);
        SymmetricMatrix {
            dim: self.dim,
            data: out,
        }
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let p = self.dim;
        SymmetricMatrix::from_fn(p, |i, j| {
            (0..=i.min(j)).map(|k| self.l(i, k) * self.l(j, k)).sum()
        })
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.l(i, i).ln()).sum::<f64>()
    }
}

/// In-place Cholesky on a row-major `n x n` buffer. Writes `L` into the
/// lower triangle (the strict upper triangle is left untouched) and returns
/// false as soon as a pivot fails [`PD_PIVOT_TOL`].
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let row_j = &a[j * n..j * n + j];
        let d = a[j * n + j] - row_j.iter().map(|v| v * v).sum::<f64>();
        if !(d > PD_PIVOT_TOL) {
            return false;
        }
        let ljj = d.sqrt();
        a[j * n + j] = ljj;
        for i in j + 1..n {
            let (top, bottom) = a.split_at_mut(i * n);
            let row_j = &top[j * n..j * n + j];
            let row_i = &mut bottom[..n];
            let s = row_i[j] - dot(&row_i[..j], row_j);
            row_i[j] = s / ljj;
        }
    }
    true
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Forward substitution with the lower factor stored row-major.
pub(crate) fn forward_sub(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let s = b[i] - dot(&l[i * n..i * n + i], &b[..i]);
        b[i] = s / l[i * n + i];
    }
}

/// Back substitution for `Lᵀ x = b`.
pub(crate) fn backward_sub_transposed(l: &[f64], n: usize, b: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Writes `(L Lᵀ)^{-1}` into `out` (full symmetric, row-major).
pub(crate) fn invert_from_cholesky(l: &[f64], n: usize, out: &mut [f64]) {
    // Column j of the inverse solves A x = e_j.
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        forward_sub(l, n, &mut col);
        backward_sub_transposed(l, n, &mut col);
        for i in j..n {
            out[i * n + j] = col[i];
            out[j * n + i] = col[i];
        }
    }
}
