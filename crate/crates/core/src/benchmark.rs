//! Replicated synthetic experiments: for every model, size, estimator and
//! replication, both components are generated, data simulated, chains run
//! and the estimates scored. Replications are spread over a worker pool;
//! aggregation is an ordered reduce, so results do not depend on the
//! scheduling.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{domain_check, Result};
use crate::exec::map_indexed;
use crate::linalg::SymmetricMatrix;
use crate::prior::{PriorKind, PriorSpec};
use crate::rng::RngStream;
use crate::sampler::{run_chain, ChainConfig};
use crate::structure::{threshold_edges, AdjacencyMatrix, CalibrationModel, DEFAULT_PSI};
use crate::summary::median;
use crate::synthetic::{
    classification_report, generate_model_repaired, loss_report, model_stream, simulate_data,
    ClassificationReport, GeneratedModel, LossReport, ModelId, ModelSpec,
};

/// Normal-approximation factor for the standard error of a median.
pub const MEDIAN_SE_FACTOR: f64 = 1.2533;
/// Component whose scores are the headline numbers.
pub const HEADLINE_COMPONENT: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Estimator {
    Sampler { prior: PriorSpec },
    /// Returns the true precision matrix; a harness self-test.
    Oracle,
}

impl Estimator {
    pub fn sampler(kind: PriorKind) -> Self {
        Estimator::Sampler {
            prior: kind.default_spec(),
        }
    }

    pub fn all_samplers() -> Vec<Self> {
        PriorKind::ALL.into_iter().map(Self::sampler).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Sampler { prior } => prior.kind().name(),
            Estimator::Oracle => "ORACLE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeMethod {
    /// `1.2533 · SD / √R`.
    Normal,
    /// Standard deviation of bootstrap medians.
    Bootstrap { resamples: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub models: Vec<ModelId>,
    pub p_values: Vec<usize>,
    pub replications: usize,
    pub estimators: Vec<Estimator>,
    pub burn_in: usize,
    pub samples: usize,
    pub thinning: usize,
    pub psi: f64,
    pub seed: u64,
    pub parallelism: usize,
    /// Observations per variable: `n = n_per_p · p`.
    pub n_per_p: usize,
    pub se_method: SeMethod,
}

impl BenchmarkConfig {
    /// Desk-length chains for all three samplers.
    pub fn desk(models: Vec<ModelId>, p_values: Vec<usize>, replications: usize, seed: u64) -> Self {
        let chain = ChainConfig::desk(PriorSpec::default(), seed);
        Self {
            models,
            p_values,
            replications,
            estimators: Estimator::all_samplers(),
            burn_in: chain.burn_in,
            samples: chain.samples,
            thinning: chain.thinning,
            psi: DEFAULT_PSI,
            seed,
            parallelism: crate::exec::default_parallelism(),
            n_per_p: 10,
            se_method: SeMethod::Normal,
        }
    }

    /// Switches to 5,000 burn-in and 10,000 retained sweeps.
    pub fn full_length(mut self) -> Self {
        let chain = ChainConfig::full_length(PriorSpec::default(), self.seed);
        self.burn_in = chain.burn_in;
        self.samples = chain.samples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        domain_check(!self.models.is_empty(), || "no models selected".into())?;
        domain_check(!self.p_values.is_empty(), || "no p values selected".into())?;
        domain_check(!self.estimators.is_empty(), || "no estimators selected".into())?;
        domain_check(self.replications >= 1, || "replications must be >= 1".into())?;
        domain_check(self.n_per_p >= 1, || "n_per_p must be >= 1".into())?;
        domain_check((0.0..=1.0).contains(&self.psi), || {
            format!("threshold must lie in [0, 1], got {}", self.psi)
        })?;
        for &model in &self.models {
            for &p in &self.p_values {
                ModelSpec::new(model, 1, p, 0).validate()?;
            }
        }
        for e in &self.estimators {
            if let Estimator::Sampler { prior } = e {
                prior.validate()?;
            }
        }
        if let SeMethod::Bootstrap { resamples } = self.se_method {
            domain_check(resamples >= 2, || "bootstrap needs >= 2 resamples".into())?;
        }
        Ok(())
    }
}

/// Scores of one estimator on one component of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub model: ModelId,
    pub p: usize,
    pub replication: usize,
    pub estimator: String,
    pub component: u8,
    pub n: usize,
    /// Ridge added to the true model to keep it positive definite.
    pub ridge: f64,
    pub losses: Option<LossReport>,
    pub classification: Option<ClassificationReport>,
    pub error: Option<String>,
    #[serde(skip)]
    pub fit: Option<Fit>,
}

/// Estimate retained alongside its truth for threshold calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub truth: SymmetricMatrix,
    pub omega_mean: SymmetricMatrix,
    pub rho_mean: SymmetricMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    L1,
    L2,
    EL1,
    EL2,
    SE,
    SP,
    PR,
    F1,
    AC,
}

impl Metric {
    pub const LOSSES: [Metric; 4] = [Metric::L1, Metric::L2, Metric::EL1, Metric::EL2];
    pub const CLASSIFICATION: [Metric; 5] = [Metric::SE, Metric::SP, Metric::PR, Metric::F1, Metric::AC];

    pub fn name(self) -> &'static str {
        match self {
            Metric::L1 => "L1",
            Metric::L2 => "L2",
            Metric::EL1 => "EL1",
            Metric::EL2 => "EL2",
            Metric::SE => "SE",
            Metric::SP => "SP",
            Metric::PR => "PR",
            Metric::F1 => "F1",
            Metric::AC => "AC",
        }
    }

    fn value(self, r: &ReplicateRecord) -> Option<f64> {
        let (l, c) = (r.losses.as_ref()?, r.classification.as_ref()?);
        Some(match self {
            Metric::L1 => l.l1,
            Metric::L2 => l.l2,
            Metric::EL1 => l.el1,
            Metric::EL2 => l.el2,
            Metric::SE => c.se,
            Metric::SP => c.sp,
            Metric::PR => c.pr,
            Metric::F1 => c.f1,
            Metric::AC => c.ac,
        })
    }
}

/// One aggregated cell: a metric's median over replications and its
/// standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub model: ModelId,
    pub p: usize,
    pub estimator: String,
    pub component: u8,
    pub metric: Metric,
    pub median: f64,
    pub se: f64,
    pub replications_ok: usize,
    pub replications_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub rows: Vec<BenchmarkRow>,
    pub replicates: Vec<ReplicateRecord>,
    pub warnings: Vec<String>,
}

impl BenchmarkReport {
    pub fn cell(
        &self,
        model: ModelId,
        p: usize,
        estimator: &str,
        component: u8,
        metric: Metric,
    ) -> Option<&BenchmarkRow> {
        self.rows.iter().find(|r| {
            r.model == model
                && r.p == p
                && r.estimator == estimator
                && r.component == component
                && r.metric == metric
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReplicateRecord> {
        self.replicates.iter().filter(|r| r.error.is_some())
    }

    /// Successful fits of `estimator` on `component`, one calibration
    /// model per replication.
    pub fn calibration_models(&self, estimator: &str, component: u8) -> Vec<CalibrationModel> {
        self.replicates
            .iter()
            .filter(|r| r.estimator == estimator && r.component == component)
            .filter_map(|r| {
                let fit = r.fit.as_ref()?;
                Some(CalibrationModel {
                    name: format!("{}-p{}-rep{}", r.model, r.p, r.replication),
                    truth_omega: fit.truth.clone(),
                    omega_mean: fit.omega_mean.clone(),
                    rho_mean: fit.rho_mean.clone(),
                })
            })
            .collect()
    }

    /// Nested summary shaped like the published tables:
    /// `components.<c>.<metric>.<model>.<p>.<estimator> = {median, se}`.
    pub fn tables_json(&self) -> Value {
        let mut components = Map::new();
        for comp in [1u8, 2] {
            let mut metrics = Map::new();
            for metric in Metric::LOSSES.into_iter().chain(Metric::CLASSIFICATION) {
                let mut by_model = Map::new();
                for &model in &self.config.models {
                    let mut by_p = Map::new();
                    for &p in &self.config.p_values {
                        let mut by_est = Map::new();
                        for e in &self.config.estimators {
                            if let Some(row) = self.cell(model, p, e.name(), comp, metric) {
                                by_est.insert(
                                    e.name().to_string(),
                                    json!({"median": row.median, "se": row.se}),
                                );
                            }
                        }
                        by_p.insert(p.to_string(), Value::Object(by_est));
                    }
                    by_model.insert(model.name().to_string(), Value::Object(by_p));
                }
                metrics.insert(metric.name().to_string(), Value::Object(by_model));
            }
            components.insert(comp.to_string(), Value::Object(metrics));
        }
        json!({
            "headline_component": HEADLINE_COMPONENT,
            "components": components,
            "failed_replications": self.failures().count(),
            "warnings": self.warnings,
        })
    }
}

/// Median of `values` and its standard error.
pub fn median_with_se(values: &[f64], method: SeMethod, rng: &mut RngStream) -> (f64, f64) {
    let m = median(values);
    let r = values.len();
    if r < 2 {
        return (m, 0.0);
    }
    let sd = |xs: &[f64]| {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    };
    let se = match method {
        SeMethod::Normal => MEDIAN_SE_FACTOR * sd(values) / (r as f64).sqrt(),
        SeMethod::Bootstrap { resamples } => {
            let medians: Vec<f64> = (0..resamples)
                .map(|_| {
                    let sample: Vec<f64> = (0..r).map(|_| values[rng.random_range(0..r)]).collect();
                    median(&sample)
                })
                .collect();
            sd(&medians)
        }
    };
    (m, se)
}

struct Job {
    model: ModelId,
    p: usize,
    rep: usize,
    est: usize,
}

pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &model in &config.models {
        for &p in &config.p_values {
            for rep in 0..config.replications {
                for est in 0..config.estimators.len() {
                    jobs.push(Job { model, p, rep, est });
                }
            }
        }
    }
    let outcomes = map_indexed(jobs.len(), config.parallelism, |k| run_job(config, &jobs[k]));
    let replicates: Vec<ReplicateRecord> = outcomes.into_iter().flatten().collect();

    let mut warnings = Vec::new();
    let mut seen = BTreeMap::new();
    for r in &replicates {
        if r.ridge > 0.0 {
            seen.entry((r.model, r.p, r.component)).or_insert(r.ridge);
        }
    }
    for ((model, p, comp), ridge) in seen {
        warnings.push(format!(
            "{model} component {comp} at p = {p} was not safely positive definite; added ridge {ridge:.6}"
        ));
    }
    for r in replicates.iter().filter(|r| r.error.is_some()) {
        warnings.push(format!(
            "{} p = {} {} component {} replication {} failed: {}",
            r.model,
            r.p,
            r.estimator,
            r.component,
            r.replication,
            r.error.as_deref().unwrap_or_default()
        ));
    }

    let mut se_rng = RngStream::with_stream(config.seed, u64::MAX);
    let mut rows = Vec::new();
    for &model in &config.models {
        for &p in &config.p_values {
            for e in &config.estimators {
                for comp in [1u8, 2] {
                    let group: Vec<&ReplicateRecord> = replicates
                        .iter()
                        .filter(|r| {
                            r.model == model && r.p == p && r.estimator == e.name() && r.component == comp
                        })
                        .collect();
                    let failed = group.iter().filter(|r| r.error.is_some()).count();
                    for metric in Metric::LOSSES.into_iter().chain(Metric::CLASSIFICATION) {
                        let values: Vec<f64> = group.iter().filter_map(|r| metric.value(r)).collect();
                        let (median, se) = if values.is_empty() {
                            (f64::NAN, f64::NAN)
                        } else {
                            median_with_se(&values, config.se_method, &mut se_rng)
                        };
                        rows.push(BenchmarkRow {
                            model,
                            p,
                            estimator: e.name().to_string(),
                            component: comp,
                            metric,
                            median,
                            se,
                            replications_ok: values.len(),
                            replications_failed: failed,
                        });
                    }
                }
            }
        }
    }
    Ok(BenchmarkReport {
        config: config.clone(),
        rows,
        replicates,
        warnings,
    })
}

/// Both components of one replication's truth plus simulated data. The
/// randomness depends only on (seed, model, p, replication), so every
/// estimator sees the same data.
fn replication_inputs(
    config: &BenchmarkConfig,
    model: ModelId,
    p: usize,
    rep: usize,
) -> Result<[(GeneratedModel, crate::data::DataMatrix); 2]> {
    let mut rng = RngStream::with_stream(config.seed, 0).split(model_stream(model, p, rep));
    let graph_seed: u64 = rng.random();
    let n = config.n_per_p * p;
    let make = |comp: u8, rng: &mut RngStream| -> Result<_> {
        let g = generate_model_repaired(&ModelSpec::new(model, comp, p, graph_seed))?;
        let data = simulate_data(&g.omega, n, rng)?;
        Ok((g, data))
    };
    let first = make(1, &mut rng)?;
    let second = make(2, &mut rng)?;
    Ok([first, second])
}

fn run_job(config: &BenchmarkConfig, job: &Job) -> Vec<ReplicateRecord> {
    let estimator = config.estimators[job.est];
    let n = config.n_per_p * job.p;
    let base = |component: u8| ReplicateRecord {
        model: job.model,
        p: job.p,
        replication: job.rep,
        estimator: estimator.name().to_string(),
        component,
        n,
        ridge: 0.0,
        losses: None,
        classification: None,
        error: None,
        fit: None,
    };
    let inputs = match replication_inputs(config, job.model, job.p, job.rep) {
        Ok(v) => v,
        Err(e) => {
            return [1u8, 2]
                .into_iter()
                .map(|c| ReplicateRecord {
                    error: Some(e.to_string()),
                    ..base(c)
                })
                .collect()
        }
    };
    inputs
        .iter()
        .zip([1u8, 2])
        .map(|((truth, data), comp)| {
            let mut rec = base(comp);
            rec.ridge = truth.ridge;
            let fit = match estimator {
                Estimator::Oracle => Ok((truth.omega.clone(), truth.omega.partial_correlations())),
                Estimator::Sampler { prior } => {
                    let stream = (1u64 << 62)
                        | (model_stream(job.model, job.p, job.rep) << 3)
                        | ((job.est as u64) << 1)
                        | (comp as u64 - 1);
                    let cfg = ChainConfig {
                        burn_in: config.burn_in,
                        samples: config.samples,
                        thinning: config.thinning,
                        seed: config.seed,
                        stream,
                        prior,
                    };
                    run_chain(data, &cfg).map(|(s, _)| (s.omega_mean, Ok(s.rho_mean)))
                }
            };
            let scored = fit.and_then(|(omega_mean, rho)| {
                let rho_mean = rho?;
                let losses = loss_report(&omega_mean, &truth.omega)?;
                let edges = threshold_edges(&rho_mean, config.psi)?;
                let class = classification_report(&edges, &AdjacencyMatrix::support(&truth.omega))?;
                Ok((losses, class, omega_mean, rho_mean))
            });
            match scored {
                Ok((losses, class, omega_mean, rho_mean)) => {
                    rec.losses = Some(losses);
                    rec.classification = Some(class);
                    rec.fit = Some(Fit {
                        truth: truth.omega.clone(),
                        omega_mean,
                        rho_mean,
                    });
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(estimators: Vec<Estimator>, reps: usize) -> BenchmarkConfig {
        BenchmarkConfig {
            estimators,
            burn_in: 50,
            samples: 100,
            parallelism: 2,
            ..BenchmarkConfig::desk(vec![ModelId::M2, ModelId::M5], vec![6], reps, 17)
        }
    }

    #[test]
    fn oracle_plug_scores_perfectly() {
        let cfg = BenchmarkConfig {
            models: ModelId::ALL.to_vec(),
            ..small(vec![Estimator::Oracle], 2)
        };
        let report = run_benchmark(&cfg).unwrap();
        for row in &report.rows {
            let expected = if Metric::LOSSES.contains(&row.metric) { 0.0 } else { 1.0 };
            // The AR(1) truth is dense, but many of its partial
            // correlations sit below the threshold.
            if row.model == ModelId::M1 && !Metric::LOSSES.contains(&row.metric) {
                continue;
            }
            assert!(
                (row.median - expected).abs() < 1e-9,
                "{:?} {} {:?}: {}",
                row.model,
                row.component,
                row.metric,
                row.median
            );
        }
    }

    #[test]
    fn deterministic_for_fixed_seed_and_parallelism_free() {
        let cfg = small(vec![Estimator::sampler(PriorKind::Bae)], 3);
        let a = run_benchmark(&cfg).unwrap();
        let b = run_benchmark(&BenchmarkConfig { parallelism: 1, ..cfg }).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.replicates, b.replicates);
    }

    #[test]
    fn estimators_share_replication_data() {
        let cfg = small(vec![], 1);
        let a = replication_inputs(&cfg, ModelId::M3, 8, 0).unwrap();
        let b = replication_inputs(&cfg, ModelId::M3, 8, 0).unwrap();
        assert_eq!(a[1].1, b[1].1);
        let c = replication_inputs(&cfg, ModelId::M3, 8, 1).unwrap();
        assert_ne!(a[1].1, c[1].1);
    }

    #[test]
    fn rows_cover_the_grid() {
        let cfg = small(Estimator::all_samplers(), 2);
        let report = run_benchmark(&cfg).unwrap();
        assert_eq!(report.rows.len(), 2 * 3 * 2 * 9);
        assert_eq!(report.replicates.len(), 2 * 2 * 3 * 2);
        assert!(report.failures().next().is_none());
        let cell = report.cell(ModelId::M5, 6, "BAGL", 2, Metric::SE).unwrap();
        assert_eq!(cell.replications_ok, 2);
        let json = report.tables_json();
        assert!(json["components"]["2"]["L1"]["M2"]["6"]["BAE"]["median"].is_number());
        assert_eq!(report.calibration_models("BAE", 2).len(), 4);
    }

    #[test]
    fn median_se_formula_and_order_invariance() {
        let mut rng = RngStream::new(0);
        let (m, se) = median_with_se(&[1.0, 2.0, 3.0, 4.0], SeMethod::Normal, &mut rng);
        assert_eq!(m, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((se - 1.2533 * sd / 2.0).abs() < 1e-12);
        let (m2, se2) = median_with_se(&[4.0, 1.0, 3.0, 2.0], SeMethod::Normal, &mut rng);
        assert_eq!((m, se), (m2, se2));
        let (_, bse) = median_with_se(&[1.0, 2.0, 3.0, 4.0, 5.0], SeMethod::Bootstrap { resamples: 200 }, &mut rng);
        assert!(bse > 0.0 && bse < 2.0);
        assert_eq!(median_with_se(&[7.0], SeMethod::Normal, &mut rng), (7.0, 0.0));
    }

    #[test]
    fn invalid_grid_rejected() {
        let mut cfg = small(vec![Estimator::Oracle], 1);
        cfg.models = vec![ModelId::M4];
        cfg.p_values = vec![7];
        assert!(run_benchmark(&cfg).is_err());
        cfg.p_values = vec![];
        assert!(run_benchmark(&cfg).is_err());
    }
}
