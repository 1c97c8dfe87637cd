//! MCMC mixing diagnostics and sweep timing.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{domain_check, Result};
use crate::exec::map_ambient;
use crate::linalg::SymmetricMatrix;
use crate::prior::PriorSpec;
use crate::rng::RngStream;
use crate::sampler::{init_state, GibbsSampler};
use crate::summary::median;
use crate::trace::ChainTrace;

/// Lags summed by default.
pub const DEFAULT_MAX_LAG: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InefficiencyFactor {
    pub value: f64,
    /// The series had zero variance; `value` is reported as 1.
    pub constant: bool,
}

/// `1 + 2 Σ_{k=1}^{max_lag} η(k)` with `η(k)` the sample autocorrelation,
/// using the biased (divide-by-N) autocovariance. Not floored at 1.
pub fn inefficiency_factor(series: &[f64], max_lag: usize) -> Result<InefficiencyFactor> {
    domain_check(max_lag >= 1, || "max_lag must be >= 1".into())?;
    domain_check(series.len() > max_lag, || {
        format!("series of length {} is too short for {max_lag} lags", series.len())
    })?;
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0 = centered.iter().map(|x| x * x).sum::<f64>();
    if c0 <= f64::MIN_POSITIVE * n as f64 {
        return Ok(InefficiencyFactor {
            value: 1.0,
            constant: true,
        });
    }
    let sum_rho: f64 = (1..=max_lag)
        .map(|k| {
            centered[k..]
                .iter()
                .zip(&centered[..n - k])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / c0
        })
        .sum();
    Ok(InefficiencyFactor {
        value: 1.0 + 2.0 * sum_rho,
        constant: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub p: usize,
    pub n_retained: usize,
    /// Element `(i, j)`, `i <= j`, in row-major upper-triangle order.
    pub elements: Vec<(usize, usize)>,
    pub factors: Vec<f64>,
    pub constant: Vec<bool>,
    pub median_of_elements: f64,
    pub lags_used: usize,
}

/// Inefficiency factor of every stored element of `Ω`. The lag window is
/// shortened to `n_retained - 1` for short traces.
pub fn chain_mixing_report(trace: &ChainTrace, max_lag: usize) -> Result<MixingReport> {
    let draws = trace.len();
    domain_check(draws >= 2, || format!("need at least 2 retained draws, got {draws}"))?;
    let lags_used = max_lag.min(draws - 1);
    let p = trace.header.p;
    let elements: Vec<(usize, usize)> = (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect();
    let results = map_ambient(elements.len(), |e| {
        inefficiency_factor(&trace.element_series(e), lags_used)
    });
    let results: Vec<InefficiencyFactor> = results.into_iter().collect::<Result<_>>()?;
    let factors: Vec<f64> = results.iter().map(|r| r.value).collect();
    Ok(MixingReport {
        p,
        n_retained: draws,
        elements,
        median_of_elements: median(&factors),
        constant: results.iter().map(|r| r.constant).collect(),
        factors,
        lags_used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub p: usize,
    pub iterations: usize,
    pub seconds: f64,
}

/// Wall-clock seconds for `iterations` BAE sweeps at each `p`, starting
/// from the identity with identity scatter and `n = 10 p`.
pub fn timing_sweep(p_values: &[usize], iterations: usize, seed: u64) -> Result<Vec<TimingRow>> {
    domain_check(iterations >= 1, || "iterations must be >= 1".into())?;
    let prior = PriorSpec::bae_default();
    p_values
        .iter()
        .map(|&p| {
            let scatter = SymmetricMatrix::identity(p);
            let mut state = init_state(p, &prior)?;
            let mut sampler = GibbsSampler::new(&scatter, 10 * p, prior)?;
            let mut rng = RngStream::new(seed);
            let start = Instant::now();
            for _ in 0..iterations {
                sampler.sweep(&mut state, &mut rng)?;
            }
            Ok(TimingRow {
                p,
                iterations,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}
