use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

/// Row-major `n x p` matrix of observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row {i} has {} columns, expected {cols}",
                r.len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Same observations with columns reordered: new column `c` is old
    /// column `order[c]`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.cols {
            return Err(Error::Shape("permutation length differs from column count".into()));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.rows {
            values.extend(order.iter().map(|&c| self.get(i, c)));
        }
        Self::new(self.rows, self.cols, values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Rescales every column to unit sample variance. Constant columns
    /// are left as they are.
    pub fn standardized(&self) -> Self {
        let means = self.column_means();
        let mut out = self.clone();
        for j in 0..self.cols {
            let ss: f64 = (0..self.rows)
                .map(|i| (self.get(i, j) - means[j]).powi(2))
                .sum();
            let sd = (ss / (self.rows.max(2) - 1) as f64).sqrt();
            if sd > 0.0 {
                for i in 0..self.rows {
                    out.values[i * self.cols + j] /= sd;
                }
            }
        }
        out
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (m, v) in means.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= self.rows as f64);
        means
    }
}

/// Column-centred scatter matrix `S = Yᵀ Y` (not divided by `n`).
pub fn scatter_matrix(data: &DataMatrix) -> Result<SymmetricMatrix> {
    if data.rows() < 2 {
        return Err(Error::Data(format!("need at least 2 observations, got {}", data.rows())));
    }
    if data.cols() < 1 {
        return Err(Error::Data("data has no columns".into()));
    }
    if let Some(pos) = data.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!(
            "non-finite value at row {}, column {}",
            pos / data.cols(),
            pos % data.cols()
        )));
    }
    let p = data.cols();
    let means = data.column_means();
    let mut s = vec![0.0; p * p];
    let mut centred = vec![0.0; p];
    for i in 0..data.rows() {
        for (c, (v, m)) in centred.iter_mut().zip(data.row(i).iter().zip(&means)) {
            *c = v - m;
        }
        for a in 0..p {
            for b in a..p {
                s[a * p + b] += centred[a] * centred[b];
            }
        }
    }
    Ok(SymmetricMatrix::from_fn(p, |a, b| s[a * p + b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_row_scatter() {
        let y = DataMatrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let s = scatter_matrix(&y).unwrap();
        assert_eq!(s, SymmetricMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap());
    }

    #[test]
    fn identical_rows_give_zero() {
        let y = DataMatrix::from_rows(&vec![vec![3.0, -1.0, 2.0]; 5]).unwrap();
        assert_eq!(scatter_matrix(&y).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn matches_sample_covariance_times_n_minus_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let (n, p) = (100, 5);
        let vals: Vec<f64> = (0..n * p).map(|_| rng.random_range(-2.0..3.0)).collect();
        let y = DataMatrix::new(n, p, vals).unwrap();
        let s = scatter_matrix(&y).unwrap();
        // Textbook two-pass covariance via nalgebra.
        let m = nalgebra::DMatrix::from_row_slice(n, p, y.as_slice());
        let mean = m.row_mean();
        let centred = nalgebra::DMatrix::from_fn(n, p, |i, j| m[(i, j)] - mean[j]);
        let cov = centred.transpose() * &centred / (n as f64 - 1.0);
        for a in 0..p {
            for b in 0..p {
                assert!((s.get(a, b) - cov[(a, b)] * (n as f64 - 1.0)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_non_finite_and_short() {
        let y = DataMatrix::from_rows(&[vec![1.0, f64::NAN], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(scatter_matrix(&y), Err(Error::Data(_))));
        let y = DataMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(scatter_matrix(&y), Err(Error::Data(_))));
    }

    #[test]
    fn standardized_has_unit_variance() {
        let y = DataMatrix::from_rows(&[vec![1.0, 10.0], vec![2.0, 30.0], vec![4.0, 20.0]]).unwrap();
        let z = y.standardized();
        let s = scatter_matrix(&z).unwrap();
        assert!((s.get(0, 0) / 2.0 - 1.0).abs() < 1e-12);
        assert!((s.get(1, 1) / 2.0 - 1.0).abs() < 1e-12);
    }
}
