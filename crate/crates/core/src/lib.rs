//! Bayesian estimation of Gaussian graphical models and differential
//! networks.
//!
//! Three block Gibbs samplers are provided over precision matrices:
//! the naïve adaptive graphical elastic net (BAE), the adaptive graphical
//! lasso (BAGL) and the adaptive graphical ridge-type (BAGR). Around them
//! sit heuristic structure learning from posterior partial correlations,
//! a two-cohort differential-network pipeline, MCMC mixing diagnostics and
//! a synthetic benchmark harness.

pub mod benchmark;
pub mod data;
pub mod diagnostics;
pub mod diffnet;
pub mod dist;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod prior;
pub mod rng;
pub mod sampler;
pub mod structure;
pub mod summary;
pub mod synthetic;
pub mod trace;

pub use data::{scatter_matrix, DataMatrix};
pub use error::{Error, Result};
pub use linalg::{CholeskyFactor, PartitionView, SymmetricMatrix};
pub use prior::{PriorKind, PriorSpec};
pub use rng::RngStream;
pub use sampler::{
    gibbs_sweep_bae, gibbs_sweep_bagl, gibbs_sweep_bagr, init_state, run_chain, run_chain_on_scatter,
    update_adaptive_bae, ChainConfig, GibbsSampler, SamplerState,
};
pub use summary::PosteriorSummary;
pub use trace::{ChainTrace, TraceHeader};
pub use benchmark::{run_benchmark, BenchmarkConfig, BenchmarkReport, Estimator, Metric};
pub use diagnostics::{chain_mixing_report, inefficiency_factor, timing_sweep, MixingReport};
pub use diffnet::{differential_network, estimate_component, estimate_pair, DifferentialNetwork};
pub use structure::{calibrate_psi, threshold_edges, wang_rule, AdjacencyMatrix, ThresholdSweepResult};
pub use synthetic::{
    classification_report, generate_model, loss_report, simulate_data, ClassificationReport, LossReport, ModelId,
    ModelSpec,
};
