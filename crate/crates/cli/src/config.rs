//! Run configuration: command-line flags override a config file, which
//! overrides built-in defaults. The resolved configuration is embedded in
//! every output so a run can be repeated from its own artifacts.

use std::path::{Path, PathBuf};

use bae::benchmark::{Estimator, SeMethod};
use bae::diagnostics::DEFAULT_MAX_LAG;
use bae::structure::DEFAULT_PSI;
use bae::{ChainConfig, ModelId, PriorKind, PriorSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every setting, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub burn_in: usize,
    pub samples: usize,
    pub thin: usize,
    pub prior: PriorSpec,
    pub psi: f64,
    pub parallelism: usize,
    pub out_dir: PathBuf,
    pub standardize: bool,
    pub write_trace: bool,
    pub models: Vec<ModelId>,
    pub p_values: Vec<usize>,
    pub replications: usize,
    pub estimators: Vec<PriorKind>,
    pub oracle: bool,
    pub bootstrap_resamples: Option<usize>,
    pub components: Vec<u8>,
    pub grid_step: f64,
    pub grid_max: f64,
    pub weights: (f64, f64),
    pub max_lag: usize,
    pub iterations: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let chain = ChainConfig::desk(PriorSpec::default(), 1);
        Self {
            seed: chain.seed,
            burn_in: chain.burn_in,
            samples: chain.samples,
            thin: chain.thinning,
            prior: chain.prior,
            psi: DEFAULT_PSI,
            parallelism: bae::exec::default_parallelism(),
            out_dir: PathBuf::from("."),
            standardize: false,
            write_trace: true,
            models: ModelId::ALL.to_vec(),
            p_values: vec![10],
            replications: 50,
            estimators: PriorKind::ALL.to_vec(),
            oracle: false,
            bootstrap_resamples: None,
            components: vec![1, 2],
            grid_step: 0.005,
            grid_max: 0.5,
            weights: (0.5, 0.5),
            max_lag: DEFAULT_MAX_LAG,
            iterations: 1000,
        }
    }
}

/// Partial settings from a config file or from flags. A missing field
/// leaves the lower-priority value in place.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialConfig {
    pub seed: Option<u64>,
    pub burn_in: Option<usize>,
    pub samples: Option<usize>,
    pub thin: Option<usize>,
    pub prior: Option<PriorSpec>,
    pub psi: Option<f64>,
    pub parallelism: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub standardize: Option<bool>,
    pub write_trace: Option<bool>,
    /// Switches chain lengths to 5,000 burn-in + 10,000 retained unless
    /// they are given explicitly.
    pub full_length: Option<bool>,
    pub models: Option<Vec<ModelId>>,
    pub p_values: Option<Vec<usize>>,
    pub replications: Option<usize>,
    pub estimators: Option<Vec<PriorKind>>,
    pub oracle: Option<bool>,
    pub bootstrap_resamples: Option<usize>,
    pub components: Option<Vec<u8>>,
    pub grid_step: Option<f64>,
    pub grid_max: Option<f64>,
    pub weights: Option<(f64, f64)>,
    pub max_lag: Option<usize>,
    pub iterations: Option<usize>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $src.$field.clone() { $dst.$field = v.into(); } )*
    };
}

impl PartialConfig {
    /// Reads a TOML file, or a JSON file holding either the settings or
    /// a previous output with an embedded `run_config`.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let bad = |e: &dyn std::fmt::Display| CliError::Parse(format!("{}: {e}", path.display()));
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e))?;
            if let Some(embedded) = value.get_mut("run_config") {
                value = embedded.take();
            }
            serde_json::from_value(value).map_err(|e| bad(&e))
        } else {
            toml::from_str(&text).map_err(|e| bad(&e))
        }
    }

    /// Applies `self` over `base`.
    pub fn apply(&self, base: &mut RunConfig) {
        if self.full_length == Some(true) {
            let full = ChainConfig::full_length(base.prior, base.seed);
            base.burn_in = full.burn_in;
            base.samples = full.samples;
        }
        overlay!(base, self;
            seed, burn_in, samples, thin, prior, psi, parallelism, out_dir, standardize,
            write_trace, models, p_values, replications, estimators, oracle, components,
            grid_step, grid_max, weights, max_lag, iterations);
        if self.bootstrap_resamples.is_some() {
            base.bootstrap_resamples = self.bootstrap_resamples;
        }
    }
}

/// Defaults, then the file, then the flags.
pub fn resolve(file: Option<&PartialConfig>, flags: &PartialConfig) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(f) = file {
        f.apply(&mut cfg);
    }
    flags.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.chain(0).validate()?;
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(CliError::Parse(msg)) };
        check((0.0..=1.0).contains(&self.psi), format!("--psi must lie in [0, 1], got {}", self.psi))?;
        check(self.parallelism >= 1, "--parallelism must be >= 1".into())?;
        check(self.replications >= 1, "--reps must be >= 1".into())?;
        check(self.iterations >= 1, "--iterations must be >= 1".into())?;
        check(self.max_lag >= 1, "--max-lag must be >= 1".into())?;
        check(
            self.grid_step > 0.0 && self.grid_max >= 0.0 && self.grid_max <= 1.0,
            format!("invalid threshold grid: step {} max {}", self.grid_step, self.grid_max),
        )?;
        check(
            self.components.iter().all(|c| *c == 1 || *c == 2) && !self.components.is_empty(),
            format!("components must be 1 and/or 2, got {:?}", self.components),
        )?;
        Ok(())
    }

    /// Chain settings for the given RNG stream.
    pub fn chain(&self, stream: u64) -> ChainConfig {
        ChainConfig {
            burn_in: self.burn_in,
            samples: self.samples,
            thinning: self.thin,
            seed: self.seed,
            stream,
            prior: self.prior,
        }
    }

    pub fn threshold_grid(&self) -> Vec<f64> {
        let steps = (self.grid_max / self.grid_step + 1e-9).floor() as usize;
        (0..=steps).map(|k| k as f64 * self.grid_step).collect()
    }

    pub fn benchmark_config(&self, estimators: Vec<Estimator>) -> bae::BenchmarkConfig {
        bae::BenchmarkConfig {
            models: self.models.clone(),
            p_values: self.p_values.clone(),
            replications: self.replications,
            estimators,
            burn_in: self.burn_in,
            samples: self.samples,
            thinning: self.thin,
            psi: self.psi,
            seed: self.seed,
            parallelism: self.parallelism,
            n_per_p: 10,
            se_method: match self.bootstrap_resamples {
                Some(resamples) => SeMethod::Bootstrap { resamples },
                None => SeMethod::Normal,
            },
        }
    }

    /// The prior for `kind`: the configured one if it is of that kind,
    /// otherwise that kind's defaults.
    pub fn prior_for(&self, kind: PriorKind) -> PriorSpec {
        if self.prior.kind() == kind {
            self.prior
        } else {
            kind.default_spec()
        }
    }

    /// Metadata block embedded in outputs.
    pub fn metadata(&self, command: &str, inputs: &[&Path]) -> serde_json::Value {
        serde_json::json!({
            "tool": "bae",
            "tool_version": TOOL_VERSION,
            "command": command,
            "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "run_config": self,
        })
    }
}
