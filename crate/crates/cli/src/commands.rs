//! Subcommand implementations. Each takes fully resolved settings and
//! returns the paths it wrote.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use bae::benchmark::{BenchmarkReport, Estimator, Metric};
use bae::structure::CalibrationModel;
use bae::{
    calibrate_psi, chain_mixing_report, differential_network, estimate_pair, run_benchmark, run_chain,
    threshold_edges, timing_sweep, ChainTrace, DataMatrix, ThresholdSweepResult,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{append_log, ensure_dir, read_csv, write_json, write_table};

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn with_metadata(meta: &Value, extra: Value) -> Value {
    let mut out = meta.clone();
    if let (Some(o), Value::Object(e)) = (out.as_object_mut(), extra) {
        o.extend(e);
    }
    out
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn load(path: &Path, cfg: &RunConfig) -> CliResult<DataMatrix> {
    let data = read_csv(path)?;
    Ok(if cfg.standardize { data.standardized() } else { data })
}

fn finish(cfg: &RunConfig, command: &str, start: Instant, outputs: Vec<PathBuf>) -> CliResult<Vec<PathBuf>> {
    append_log(&cfg.out_dir, command, start.elapsed().as_secs_f64(), &outputs)?;
    Ok(outputs)
}

/// Posterior summary, optional trace, and thresholded edge list.
pub fn cmd_estimate(csv: &Path, cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    let data = load(csv, cfg)?;
    ensure_dir(&cfg.out_dir)?;
    let meta = cfg.metadata("estimate", &[csv]);
    let (summary, mut trace) = run_chain(&data, &cfg.chain(0))?;
    let edges = threshold_edges(&summary.rho_mean, cfg.psi)?;
    let mut outputs = vec![write_json(
        &cfg.out_dir.join("summary.json"),
        &with_metadata(&meta, json!({ "edge_count": edges.edge_count(), "summary": summary })),
    )?];
    if cfg.write_trace {
        let path = cfg.out_dir.join("trace.bin");
        trace.header.run_config = Some(meta.clone());
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        trace.write_to(BufWriter::new(file))?;
        outputs.push(path);
    }
    let p = summary.dim_p;
    let rows = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).map(|(i, j)| {
        vec![
            (i + 1).to_string(),
            (j + 1).to_string(),
            fmt(summary.rho_mean.get(i, j)),
            fmt(summary.omega_mean.get(i, j)),
            u8::from(edges.get(i, j)).to_string(),
        ]
    });
    outputs.push(write_table(
        &cfg.out_dir.join("edges.tsv"),
        b'\t',
        &meta,
        &["i", "j", "rho_mean", "omega_mean", "present"],
        rows,
    )?);
    finish(cfg, "estimate", start, outputs)
}

/// Both cohorts estimated concurrently, then differenced.
pub fn cmd_diffnet(csv_a: &Path, csv_b: &Path, cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    let (a, b) = (load(csv_a, cfg)?, load(csv_b, cfg)?);
    if a.cols() != b.cols() {
        return Err(CliError::Shape(format!(
            "{} has {} columns but {} has {}",
            csv_a.display(),
            a.cols(),
            csv_b.display(),
            b.cols()
        )));
    }
    ensure_dir(&cfg.out_dir)?;
    let meta = cfg.metadata("diffnet", &[csv_a, csv_b]);
    let [(s1, _), (s2, _)] = estimate_pair(&a, &b, &cfg.chain(0), cfg.parallelism)?;
    let net = differential_network(&s1, &s2, cfg.psi)?;
    let edges = net.classified_edges();
    let mut outputs = vec![write_json(
        &cfg.out_dir.join("diffnet.json"),
        &with_metadata(
            &meta,
            json!({
                "differential_edge_count": edges.len(),
                "differential_edges": edges,
                "network": net,
                "omega_mean": [s1.omega_mean, s2.omega_mean],
            }),
        ),
    )?];
    let rows = edges.iter().map(|e| {
        vec![
            (e.i + 1).to_string(),
            (e.j + 1).to_string(),
            fmt(e.rho1),
            fmt(e.rho2),
            fmt(e.delta),
            e.class.name().to_string(),
        ]
    });
    outputs.push(write_table(
        &cfg.out_dir.join("delta_edges.tsv"),
        b'\t',
        &meta,
        &["i", "j", "rho1", "rho2", "delta", "class"],
        rows,
    )?);
    finish(cfg, "diffnet", start, outputs)
}

fn estimators(cfg: &RunConfig) -> Vec<Estimator> {
    let mut out: Vec<Estimator> = cfg
        .estimators
        .iter()
        .map(|&k| Estimator::Sampler { prior: cfg.prior_for(k) })
        .collect();
    if cfg.oracle {
        out.push(Estimator::Oracle);
    }
    out
}

pub fn run_benchmark_for(cfg: &RunConfig) -> CliResult<BenchmarkReport> {
    let report = run_benchmark(&cfg.benchmark_config(estimators(cfg)))?;
    warn_all(&report.warnings);
    Ok(report)
}

/// Replicated synthetic experiments written as long and nested tables.
pub fn cmd_benchmark(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    ensure_dir(&cfg.out_dir)?;
    let report = run_benchmark_for(cfg)?;
    let meta = cfg.metadata("benchmark", &[]);
    let rows = report.rows.iter().map(|r| {
        vec![
            r.model.name().to_string(),
            r.p.to_string(),
            r.estimator.clone(),
            r.component.to_string(),
            r.metric.name().to_string(),
            fmt(r.median),
            fmt(r.se),
            r.replications_ok.to_string(),
            r.replications_failed.to_string(),
        ]
    });
    let outputs = vec![
        write_table(
            &cfg.out_dir.join("tables.csv"),
            b',',
            &meta,
            &[
                "model",
                "p",
                "estimator",
                "component",
                "metric",
                "median",
                "se",
                "replications_ok",
                "replications_failed",
            ],
            rows,
        )?,
        write_json(
            &cfg.out_dir.join("tables.json"),
            &with_metadata(
                &meta,
                json!({ "tables": report.tables_json(), "replicates": report.replicates }),
            ),
        )?,
    ];
    finish(cfg, "benchmark", start, outputs)
}

/// Calibration models from a benchmark report: every successful fit of
/// `estimator` on the listed components.
pub fn calibration_models(report: &BenchmarkReport, estimator: &str, components: &[u8]) -> Vec<CalibrationModel> {
    components
        .iter()
        .flat_map(|&c| {
            report.calibration_models(estimator, c).into_iter().map(move |mut m| {
                m.name = format!("{}-c{c}", m.name);
                m
            })
        })
        .collect()
}

pub fn calibrate_from_report(
    report: &BenchmarkReport,
    estimator: &str,
    cfg: &RunConfig,
) -> CliResult<ThresholdSweepResult> {
    let models = calibration_models(report, estimator, &cfg.components);
    Ok(calibrate_psi(&models, &cfg.threshold_grid(), cfg.weights)?)
}

/// Threshold calibration over synthetic models with the configured prior.
pub fn cmd_calibrate(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    ensure_dir(&cfg.out_dir)?;
    let kind = cfg.prior.kind();
    let bench_cfg = RunConfig {
        estimators: vec![kind],
        oracle: false,
        ..cfg.clone()
    };
    let report = run_benchmark_for(&bench_cfg)?;
    let result = calibrate_from_report(&report, kind.name(), cfg)?;
    warn_all(&result.warnings);
    let meta = cfg.metadata("calibrate", &[]);
    let rows = result
        .records()
        .into_iter()
        .map(|r| vec![fmt(r.threshold), r.model, fmt(r.f1), fmt(r.l1)]);
    let outputs = vec![
        write_table(&cfg.out_dir.join("sweep.csv"), b',', &meta, &["threshold", "model", "f1", "l1"], rows)?,
        write_json(
            &cfg.out_dir.join("psi.json"),
            &with_metadata(
                &meta,
                json!({
                    "psi": result.psi,
                    "psi_f1_median": result.psi_f1_median,
                    "psi_l1_median": result.psi_l1_median,
                    "weights": result.weights,
                    "per_model": result.models.iter().zip(result.psi_f1.iter().zip(&result.psi_l1))
                        .map(|(m, (f, l))| json!({"model": m, "psi_f1": f, "psi_l1": l}))
                        .collect::<Vec<_>>(),
                    "warnings": result.warnings,
                }),
            ),
        )?,
    ];
    finish(cfg, "calibrate", start, outputs)
}

pub fn read_trace(path: &Path) -> CliResult<ChainTrace> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    ChainTrace::read_from(BufReader::new(file)).map_err(|e| match e {
        bae::Error::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        other => CliError::Parse(format!("{}: {other}", path.display())),
    })
}

/// Per-element inefficiency factors of a stored trace.
pub fn cmd_diagnose(trace_path: &Path, cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    let trace = read_trace(trace_path)?;
    ensure_dir(&cfg.out_dir)?;
    let report = chain_mixing_report(&trace, cfg.max_lag)?;
    let meta = with_metadata(
        &cfg.metadata("diagnose", &[trace_path]),
        json!({
            "median_of_elements": report.median_of_elements,
            "lags_used": report.lags_used,
            "n_retained": report.n_retained,
        }),
    );
    let rows = report.elements.iter().enumerate().map(|(k, &(i, j))| {
        vec![
            (i + 1).to_string(),
            (j + 1).to_string(),
            fmt(report.factors[k]),
            u8::from(report.constant[k]).to_string(),
        ]
    });
    let outputs = vec![write_table(
        &cfg.out_dir.join("mixing.csv"),
        b',',
        &meta,
        &["i", "j", "inefficiency_factor", "constant"],
        rows,
    )?];
    println!("median inefficiency factor: {}", report.median_of_elements);
    finish(cfg, "diagnose", start, outputs)
}

/// Wall-clock seconds of BAE sweeps across dimensions.
pub fn cmd_timing(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let start = Instant::now();
    ensure_dir(&cfg.out_dir)?;
    let rows = timing_sweep(&cfg.p_values, cfg.iterations, cfg.seed)?;
    let meta = cfg.metadata("timing", &[]);
    let outputs = vec![write_table(
        &cfg.out_dir.join("timing.csv"),
        b',',
        &meta,
        &["p", "iterations", "seconds"],
        rows.iter()
            .map(|r| vec![r.p.to_string(), r.iterations.to_string(), fmt(r.seconds)]),
    )?];
    finish(cfg, "timing", start, outputs)
}

/// Headline cell lookup used by reports and tests.
pub fn headline(report: &BenchmarkReport, model: bae::ModelId, p: usize, estimator: &str, metric: Metric) -> f64 {
    report
        .cell(model, p, estimator, bae::benchmark::HEADLINE_COMPONENT, metric)
        .map(|c| c.median)
        .unwrap_or(f64::NAN)
}
