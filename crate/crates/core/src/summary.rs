use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_ambient;
use crate::linalg::SymmetricMatrix;
use crate::trace::ChainTrace;

/// Element-wise 5%, 50% and 95% posterior quantiles of `omega`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementQuantiles {
    pub q05: SymmetricMatrix,
    pub q50: SymmetricMatrix,
    pub q95: SymmetricMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub dim_p: usize,
    pub sample_size_n: usize,
    pub n_retained: usize,
    pub omega_mean: SymmetricMatrix,
    pub omega_median: SymmetricMatrix,
    /// Mean of the per-draw partial correlations.
    pub rho_mean: SymmetricMatrix,
    pub rho_median: SymmetricMatrix,
    pub element_quantiles: ElementQuantiles,
}

struct ElementStats {
    mean: f64,
    q05: f64,
    q50: f64,
    q95: f64,
    rho_mean: f64,
    rho_median: f64,
}

impl PosteriorSummary {
    pub fn from_trace(trace: &ChainTrace) -> Result<Self> {
        let p = trace.header.p;
        let draws = trace.len();
        if draws == 0 {
            return Err(Error::Data("trace has no retained draws".into()));
        }
        let width = p * (p + 1) / 2;
        let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect();
        let diag_pos: Vec<usize> = (0..p).map(|i| upper_index(p, i, i)).collect();

        let stats = map_ambient(width, |e| {
            let (i, j) = pairs[e];
            let mut values: Vec<f64> = (0..draws).map(|t| trace.row(t)[e]).collect();
            let mut rho: Vec<f64> = if i == j {
                vec![1.0; draws]
            } else {
                (0..draws)
                    .map(|t| {
                        let row = trace.row(t);
                        -row[e] / (row[diag_pos[i]] * row[diag_pos[j]]).sqrt()
                    })
                    .collect()
            };
            let mean = values.iter().sum::<f64>() / draws as f64;
            let rho_mean = rho.iter().sum::<f64>() / draws as f64;
            values.sort_by(|a, b| a.total_cmp(b));
            rho.sort_by(|a, b| a.total_cmp(b));
            ElementStats {
                mean,
                q05: quantile_sorted(&values, 0.05),
                q50: quantile_sorted(&values, 0.5),
                q95: quantile_sorted(&values, 0.95),
                rho_mean,
                rho_median: quantile_sorted(&rho, 0.5),
            }
        });

        let pick = |f: &dyn Fn(&ElementStats) -> f64| {
            let v: Vec<f64> = stats.iter().map(f).collect();
            SymmetricMatrix::from_upper_triangle(p, &v)
        };
        let omega_median = pick(&|s| s.q50)?;
        Ok(Self {
            dim_p: p,
            sample_size_n: trace.header.n,
            n_retained: draws,
            omega_mean: pick(&|s| s.mean)?,
            omega_median: omega_median.clone(),
            rho_mean: pick(&|s| s.rho_mean)?,
            rho_median: pick(&|s| s.rho_median)?,
            element_quantiles: ElementQuantiles {
                q05: pick(&|s| s.q05)?,
                q50: omega_median,
                q95: pick(&|s| s.q95)?,
            },
        })
    }
}

/// Position of `(i, j)`, `i <= j`, in the row-major upper triangle.
pub fn upper_index(p: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < p);
    i * p - i * (i + 1) / 2 + j
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    quantile_sorted(&v, 0.5)
}
