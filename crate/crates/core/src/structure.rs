//! Graph structure from posterior partial correlations.
//!
//! The primary rule keeps edge `(i, j)` when `|ρ̃_ij| > ψ`. The threshold
//! `ψ` can be calibrated on models with known structure by balancing the
//! F1-optimal and L1-optimal thresholds. A Wishart-reference rule is
//! provided as an alternative.

use serde::{Deserialize, Serialize};

use crate::dist::wishart_from_factor;
use crate::error::{domain_check, Error, Result};
use crate::exec::map_ambient;
use crate::linalg::{partial_correlations_unchecked, SymmetricMatrix};
use crate::rng::RngStream;
use crate::summary::median;
use crate::synthetic::classification_report;

/// Threshold suggested for general use.
pub const DEFAULT_PSI: f64 = 0.12;
/// Reference draws used by [`wang_rule`].
pub const WANG_REFERENCE_DRAWS: usize = 10_000;
/// Degrees of freedom of the reference Wishart prior.
pub const WANG_PRIOR_DF: f64 = 3.0;
/// Reference expectations closer to zero than this cannot form a ratio.
pub const WANG_REFERENCE_FLOOR: f64 = 1e-12;

/// Undirected graph on `dim` vertices without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    dim: usize,
    data: Vec<bool>,
}

impl AdjacencyMatrix {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            data: vec![false; dim * dim],
        }
    }

    /// Builds a graph from a predicate evaluated on pairs `i < j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = Self::empty(dim);
        for i in 0..dim {
            for j in i + 1..dim {
                if f(i, j) {
                    adj.data[i * dim + j] = true;
                    adj.data[j * dim + i] = true;
                }
            }
        }
        adj
    }

    /// The support of a precision matrix: nonzero off-diagonal entries.
    pub fn support(omega: &SymmetricMatrix) -> Self {
        Self::from_fn(omega.dim(), |i, j| omega.get(i, j) != 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.dim + j]
    }

    /// Sets edge `(i, j)` and its mirror.
    pub fn set(&mut self, i: usize, j: usize, present: bool) -> Result<()> {
        if i >= self.dim || j >= self.dim {
            return Err(Error::Index {
                index: i.max(j),
                dim: self.dim,
            });
        }
        if i == j {
            return Err(Error::ParameterDomain("self-loops are not allowed".into()));
        }
        self.data[i * self.dim + j] = present;
        self.data[j * self.dim + i] = present;
        Ok(())
    }

    /// Present edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let p = self.dim;
        (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dim == other.dim && self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.dim, |i, j| self.get(i, j) || other.get(i, j)))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "graphs have {} and {} vertices",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

fn check_psi(psi: f64) -> Result<()> {
    domain_check((0.0..=1.0).contains(&psi), || {
        format!("threshold must lie in [0, 1], got {psi}")
    })
}

/// Edge `(i, j)` is present iff `|rho_mean[i][j]| > psi`.
pub fn threshold_edges(rho_mean: &SymmetricMatrix, psi: f64) -> Result<AdjacencyMatrix> {
    check_psi(psi)?;
    Ok(AdjacencyMatrix::from_fn(rho_mean.dim(), |i, j| {
        rho_mean.get(i, j).abs() > psi
    }))
}

/// Posterior-mean precision with off-diagonal entries zeroed wherever the
/// partial correlation does not exceed `psi` in absolute value.
pub fn thresholded_estimate(
    omega_mean: &SymmetricMatrix,
    rho_mean: &SymmetricMatrix,
    psi: f64,
) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(omega_mean.dim(), |i, j| {
        if i == j || rho_mean.get(i, j).abs() > psi {
            omega_mean.get(i, j)
        } else {
            0.0
        }
    })
}

/// A fitted model with known truth, used to calibrate the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub name: String,
    pub truth_omega: SymmetricMatrix,
    pub omega_mean: SymmetricMatrix,
    pub rho_mean: SymmetricMatrix,
}

/// One point of a calibration curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub threshold: f64,
    pub model: String,
    pub f1: f64,
    pub l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweepResult {
    pub thresholds: Vec<f64>,
    /// Names of the models that contributed, aligned with the curves.
    pub models: Vec<String>,
    /// `f1_curve[m][t]`: F1 of model `m` at `thresholds[t]`.
    pub f1_curve: Vec<Vec<f64>>,
    pub l1_curve: Vec<Vec<f64>>,
    /// Per-model F1-maximizing and L1-minimizing thresholds.
    pub psi_f1: Vec<f64>,
    pub psi_l1: Vec<f64>,
    pub psi_f1_median: f64,
    pub psi_l1_median: f64,
    pub weights: (f64, f64),
    pub psi: f64,
    pub warnings: Vec<String>,
}

impl ThresholdSweepResult {
    /// Long-format records for plotting the calibration curves.
    pub fn records(&self) -> Vec<SweepRecord> {
        let mut out = Vec::with_capacity(self.models.len() * self.thresholds.len());
        for (m, name) in self.models.iter().enumerate() {
            for (t, &threshold) in self.thresholds.iter().enumerate() {
                out.push(SweepRecord {
                    threshold,
                    model: name.clone(),
                    f1: self.f1_curve[m][t],
                    l1: self.l1_curve[m][t],
                });
            }
        }
        out
    }
}

/// `0.000, 0.005, …, 0.500`.
pub fn default_threshold_grid() -> Vec<f64> {
    (0..=100).map(|k| k as f64 * 0.005).collect()
}

/// Picks the threshold that maximizes F1 and the one that minimizes the
/// L1 loss of the thresholded estimate for each model, then balances their
/// medians across models: `psi = w.0 * median_f1 + w.1 * median_l1`.
/// Ties go to the smaller threshold.
pub fn calibrate_psi(
    models: &[CalibrationModel],
    grid: &[f64],
    weights: (f64, f64),
) -> Result<ThresholdSweepResult> {
    domain_check(!models.is_empty(), || "need at least one model".into())?;
    domain_check(!grid.is_empty(), || "threshold grid is empty".into())?;
    domain_check(grid.windows(2).all(|w| w[0] < w[1]), || {
        "threshold grid must be strictly ascending".into()
    })?;
    for &t in grid {
        check_psi(t)?;
    }
    domain_check(
        weights.0 >= 0.0 && weights.1 >= 0.0 && weights.0.is_finite() && weights.1.is_finite(),
        || format!("weights must be non-negative, got {weights:?}"),
    )?;

    let mut warnings = Vec::new();
    let mut kept = Vec::new();
    for m in models {
        let p = m.truth_omega.dim();
        if m.omega_mean.dim() != p || m.rho_mean.dim() != p {
            return Err(Error::Shape(format!("model {} has inconsistent dimensions", m.name)));
        }
        if AdjacencyMatrix::support(&m.truth_omega).edge_count() == 0 {
            warnings.push(format!("model {} has no true edges; F1 undefined, excluded", m.name));
        } else {
            kept.push(m);
        }
    }
    if kept.is_empty() {
        return Err(Error::Data("every calibration model lacks true edges".into()));
    }

    let curves = map_ambient(kept.len(), |k| {
        let m = kept[k];
        let truth = AdjacencyMatrix::support(&m.truth_omega);
        let mut f1 = Vec::with_capacity(grid.len());
        let mut l1 = Vec::with_capacity(grid.len());
        for &t in grid {
            let est = AdjacencyMatrix::from_fn(truth.dim(), |i, j| m.rho_mean.get(i, j).abs() > t);
            f1.push(classification_report(&est, &truth).map(|c| c.f1).unwrap_or(0.0));
            let thresholded = thresholded_estimate(&m.omega_mean, &m.rho_mean, t);
            l1.push(thresholded.sub(&m.truth_omega).map(|d| d.l1_norm()).unwrap_or(f64::INFINITY));
        }
        (f1, l1)
    });

    let mut psi_f1 = Vec::with_capacity(kept.len());
    let mut psi_l1 = Vec::with_capacity(kept.len());
    for (f1, l1) in &curves {
        // Strict comparisons keep the first (smallest) optimal threshold.
        let best_f1 = (1..grid.len()).fold(0, |b, t| if f1[t] > f1[b] { t } else { b });
        let best_l1 = (1..grid.len()).fold(0, |b, t| if l1[t] < l1[b] { t } else { b });
        psi_f1.push(grid[best_f1]);
        psi_l1.push(grid[best_l1]);
    }
    let psi_f1_median = median(&psi_f1);
    let psi_l1_median = median(&psi_l1);
    let (f1_curve, l1_curve) = curves.into_iter().unzip();
    Ok(ThresholdSweepResult {
        thresholds: grid.to_vec(),
        models: kept.iter().map(|m| m.name.clone()).collect(),
        f1_curve,
        l1_curve,
        psi_f1,
        psi_l1,
        psi_f1_median,
        psi_l1_median,
        weights,
        psi: weights.0 * psi_f1_median + weights.1 * psi_l1_median,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WangRuleResult {
    pub edges: AdjacencyMatrix,
    /// Monte Carlo estimate of the reference posterior-mean partial
    /// correlations.
    pub reference_rho: SymmetricMatrix,
    pub warnings: Vec<String>,
}

/// Reference-ratio rule: edge `(i, j)` is present iff
/// `rho_mean[i][j] / E(ρ_ij | Y) > 0.5`, where the expectation is taken
/// under the conjugate `W(3 + n, (I + S)^{-1})` posterior of a `W(3, I)`
/// prior, estimated from [`WANG_REFERENCE_DRAWS`] draws.
pub fn wang_rule(
    rho_mean: &SymmetricMatrix,
    scatter: &SymmetricMatrix,
    n: usize,
    rng: &mut RngStream,
) -> Result<WangRuleResult> {
    wang_rule_with_draws(rho_mean, scatter, n, WANG_REFERENCE_DRAWS, rng)
}

pub fn wang_rule_with_draws(
    rho_mean: &SymmetricMatrix,
    scatter: &SymmetricMatrix,
    n: usize,
    draws: usize,
    rng: &mut RngStream,
) -> Result<WangRuleResult> {
    let p = rho_mean.dim();
    if scatter.dim() != p {
        return Err(Error::Shape(format!(
            "partial correlations are {p}x{p}, scatter is {0}x{0}",
            scatter.dim()
        )));
    }
    domain_check(draws >= 1, || "need at least one reference draw".into())?;
    let reference_rho = wishart_reference_rho(scatter, n, draws, rng)?;
    Ok(wang_rule_from_reference(rho_mean, reference_rho))
}

/// Monte Carlo mean of the partial correlations under `W(3 + n, (I + S)^{-1})`.
pub fn wishart_reference_rho(
    scatter: &SymmetricMatrix,
    n: usize,
    draws: usize,
    rng: &mut RngStream,
) -> Result<SymmetricMatrix> {
    let p = scatter.dim();
    let scale = SymmetricMatrix::identity(p).add(scatter)?.inverse()?;
    let chol = scale.cholesky()?;
    let df = WANG_PRIOR_DF + n as f64;
    let mut acc = SymmetricMatrix::zeros(p);
    for _ in 0..draws {
        let w = wishart_from_factor(df, &chol, rng);
        acc = acc.add(&partial_correlations_unchecked(&w))?;
    }
    Ok(acc.scaled(1.0 / draws as f64))
}

/// Applies the ratio rule against a given reference.
pub fn wang_rule_from_reference(
    rho_mean: &SymmetricMatrix,
    reference_rho: SymmetricMatrix,
) -> WangRuleResult {
    let p = rho_mean.dim();
    let mut warnings = Vec::new();
    let edges = AdjacencyMatrix::from_fn(p, |i, j| {
        let r = reference_rho.get(i, j);
        if r.abs() < WANG_REFERENCE_FLOOR {
            warnings.push(format!("pair ({i}, {j}): reference expectation is zero; marked absent"));
            false
        } else {
            rho_mean.get(i, j) / r > 0.5
        }
    });
    WangRuleResult {
        edges,
        reference_rho,
        warnings,
    }
}
