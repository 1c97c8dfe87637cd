//! Differential networks between two cohorts.
//!
//! Each cohort's precision matrix is estimated independently; the
//! differential network is `Δ = Ω̂₂ − Ω̂₁` together with a per-pair
//! classification of how the thresholded graphs differ.

use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::linalg::SymmetricMatrix;
use crate::sampler::{run_chain, ChainConfig};
use crate::structure::{threshold_edges, AdjacencyMatrix};
use crate::summary::PosteriorSummary;
use crate::trace::ChainTrace;

/// Posterior summary of one cohort.
pub fn estimate_component(data: &DataMatrix, config: &ChainConfig) -> Result<PosteriorSummary> {
    Ok(run_chain(data, config)?.0)
}

/// Estimates both cohorts concurrently. The second chain runs on the
/// stream after the configured one, so the two chains never share random
/// numbers even when the data sets coincide.
pub fn estimate_pair(
    data1: &DataMatrix,
    data2: &DataMatrix,
    config: &ChainConfig,
    parallelism: usize,
) -> Result<[(PosteriorSummary, ChainTrace); 2]> {
    if data1.cols() != data2.cols() {
        return Err(Error::Shape(format!(
            "cohorts have {} and {} variables",
            data1.cols(),
            data2.cols()
        )));
    }
    let mut results = map_indexed(2, parallelism, |k| {
        let (data, cfg) = if k == 0 {
            (data1, *config)
        } else {
            (data2, config.with_stream(config.stream + 1))
        };
        run_chain(data, &cfg)
    });
    let second = results.pop().expect("two results")?;
    let first = results.pop().expect("two results")?;
    Ok([first, second])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeChange {
    /// Present in cohort 2 only.
    Gained,
    /// Present in cohort 1 only.
    Lost,
    /// Present in both, with partial correlations differing by more than
    /// the threshold; the sign of `delta` gives the direction.
    Strengthened,
}

impl EdgeChange {
    pub fn name(self) -> &'static str {
        match self {
            EdgeChange::Gained => "gained",
            EdgeChange::Lost => "lost",
            EdgeChange::Strengthened => "strengthened",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialEdge {
    pub i: usize,
    pub j: usize,
    pub rho1: f64,
    pub rho2: f64,
    pub delta: f64,
    pub class: EdgeChange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialNetwork {
    /// `omega_mean₂ − omega_mean₁`.
    pub delta: SymmetricMatrix,
    pub rho1: SymmetricMatrix,
    pub rho2: SymmetricMatrix,
    pub edges1: AdjacencyMatrix,
    pub edges2: AdjacencyMatrix,
    pub differential_edges: AdjacencyMatrix,
    pub psi_used: f64,
}

impl DifferentialNetwork {
    /// Classified differential edges, `i < j`, in row-major order.
    pub fn classified_edges(&self) -> Vec<DifferentialEdge> {
        self.differential_edges
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let class = match (self.edges1.get(i, j), self.edges2.get(i, j)) {
                    (false, true) => EdgeChange::Gained,
                    (true, false) => EdgeChange::Lost,
                    _ => EdgeChange::Strengthened,
                };
                DifferentialEdge {
                    i,
                    j,
                    rho1: self.rho1.get(i, j),
                    rho2: self.rho2.get(i, j),
                    delta: self.delta.get(i, j),
                    class,
                }
            })
            .collect()
    }
}

/// A pair is differential when it is an edge in exactly one cohort, or in
/// both with `|ρ̃₂ − ρ̃₁| > psi`.
pub fn differential_network(
    summary1: &PosteriorSummary,
    summary2: &PosteriorSummary,
    psi: f64,
) -> Result<DifferentialNetwork> {
    if summary1.dim_p != summary2.dim_p {
        return Err(Error::Shape(format!(
            "summaries have p = {} and p = {}",
            summary1.dim_p, summary2.dim_p
        )));
    }
    let edges1 = threshold_edges(&summary1.rho_mean, psi)?;
    let edges2 = threshold_edges(&summary2.rho_mean, psi)?;
    let (rho1, rho2) = (&summary1.rho_mean, &summary2.rho_mean);
    let differential_edges = AdjacencyMatrix::from_fn(summary1.dim_p, |i, j| {
        let (a, b) = (edges1.get(i, j), edges2.get(i, j));
        (a != b) || (a && b && (rho2.get(i, j) - rho1.get(i, j)).abs() > psi)
    });
    Ok(DifferentialNetwork {
        delta: summary2.omega_mean.sub(&summary1.omega_mean)?,
        rho1: rho1.clone(),
        rho2: rho2.clone(),
        edges1,
        edges2,
        differential_edges,
        psi_used: psi,
    })
}
