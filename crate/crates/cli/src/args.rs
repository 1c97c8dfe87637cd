use std::path::PathBuf;

use bae::{ModelId, PriorKind};
use clap::{Args, Parser, Subcommand};

use crate::config::{resolve, PartialConfig, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "bae", version, about = "Bayesian graphical models and differential networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate one precision matrix and its graph from a CSV file.
    Estimate {
        csv: PathBuf,
        /// Skip writing trace.bin.
        #[arg(long)]
        no_trace: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Differential network between two cohorts.
    Diffnet {
        csv_a: PathBuf,
        csv_b: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Replicated synthetic benchmark.
    Benchmark {
        #[command(flatten)]
        grid: GridArgs,
        /// Estimators to run (comma-separated: bae,bagl,bagr).
        #[arg(long, value_delimiter = ',')]
        estimators: Option<Vec<PriorKind>>,
        /// Also score the true matrix as a harness self-test.
        #[arg(long)]
        oracle: bool,
        /// Bootstrap resamples for median standard errors instead of the
        /// normal approximation.
        #[arg(long)]
        bootstrap: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Calibrate the partial-correlation threshold on synthetic models.
    Calibrate {
        #[command(flatten)]
        grid: GridArgs,
        /// Model components to calibrate on (comma-separated: 1,2).
        #[arg(long, value_delimiter = ',')]
        components: Option<Vec<u8>>,
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        grid_max: Option<f64>,
        /// Weights on the F1 and L1 medians, e.g. 0.5,0.5.
        #[arg(long, value_parser = parse_weights)]
        weights: Option<(f64, f64)>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Mixing diagnostics for a stored trace.
    Diagnose {
        trace: PathBuf,
        #[arg(long)]
        max_lag: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Time BAE sweeps across dimensions.
    Timing {
        #[arg(long = "p", value_delimiter = ',')]
        p_values: Option<Vec<usize>>,
        #[arg(long)]
        iterations: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Default, Args)]
pub struct GridArgs {
    /// Models (comma-separated: M1..M6).
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<ModelId>>,
    /// Dimensions (comma-separated).
    #[arg(long = "p", value_delimiter = ',')]
    pub p_values: Option<Vec<usize>>,
    #[arg(long = "reps")]
    pub replications: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Prior family; hyperparameters come from the config file when it
    /// names the same family, otherwise the family defaults.
    #[arg(long)]
    pub prior: Option<PriorKind>,
    #[arg(long)]
    pub psi: Option<f64>,
    /// Worker threads (default: BAE_PARALLELISM, else all cores).
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// TOML settings file, or a JSON output whose embedded settings to reuse.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scale columns to unit variance (columns are always centered).
    #[arg(long)]
    pub standardize: bool,
    /// 5,000 burn-in and 10,000 retained sweeps.
    #[arg(long)]
    pub full_length: bool,
}

impl CommonArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            seed: self.seed,
            burn_in: self.burn_in,
            samples: self.samples,
            thin: self.thin,
            psi: self.psi,
            parallelism: self.parallelism,
            out_dir: self.out_dir.clone(),
            standardize: self.standardize.then_some(true),
            full_length: self.full_length.then_some(true),
            ..Default::default()
        }
    }

    /// Resolves defaults, the config file and these flags plus any
    /// subcommand-specific ones in `extra`.
    pub fn resolve(&self, extra: impl FnOnce(&mut PartialConfig)) -> CliResult<RunConfig> {
        let file = self.config.as_deref().map(PartialConfig::from_file).transpose()?;
        let mut flags = self.partial();
        extra(&mut flags);
        let mut cfg = resolve(file.as_ref(), &flags)?;
        if let Some(kind) = self.prior {
            if cfg.prior.kind() != kind {
                cfg.prior = kind.default_spec();
            }
        }
        Ok(cfg)
    }
}

impl GridArgs {
    pub fn apply_to(&self, p: &mut PartialConfig) {
        p.models = self.models.clone();
        p.p_values = self.p_values.clone();
        p.replications = self.replications;
    }
}

fn parse_weights(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(format!("expected two comma-separated weights, got {s:?}"));
    };
    let num = |v: &str| v.parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(a)?, num(b)?))
}
