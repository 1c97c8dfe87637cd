//! Command-line front end: CSV ingestion, layered configuration, and the
//! `estimate`, `diffnet`, `benchmark`, `calibrate`, `diagnose` and
//! `timing` subcommands.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::path::PathBuf;

pub use args::{Cli, Command};
pub use commands::{cmd_benchmark, cmd_calibrate, cmd_diagnose, cmd_diffnet, cmd_estimate, cmd_timing};
pub use config::{PartialConfig, RunConfig};
pub use error::{CliError, CliResult};

/// Executes a parsed command line.
pub fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    match cli.command {
        Command::Estimate { csv, no_trace, common } => {
            let cfg = common.resolve(|p| {
                if no_trace {
                    p.write_trace = Some(false);
                }
            })?;
            cmd_estimate(&csv, &cfg)
        }
        Command::Diffnet { csv_a, csv_b, common } => cmd_diffnet(&csv_a, &csv_b, &common.resolve(|_| {})?),
        Command::Benchmark {
            grid,
            estimators,
            oracle,
            bootstrap,
            common,
        } => {
            let cfg = common.resolve(|p| {
                grid.apply_to(p);
                p.estimators = estimators;
                p.oracle = oracle.then_some(true);
                p.bootstrap_resamples = bootstrap;
            })?;
            cmd_benchmark(&cfg)
        }
        Command::Calibrate {
            grid,
            components,
            grid_step,
            grid_max,
            weights,
            common,
        } => {
            let cfg = common.resolve(|p| {
                grid.apply_to(p);
                p.components = components;
                p.grid_step = grid_step;
                p.grid_max = grid_max;
                p.weights = weights;
            })?;
            cmd_calibrate(&cfg)
        }
        Command::Diagnose { trace, max_lag, common } => {
            cmd_diagnose(&trace, &common.resolve(|p| p.max_lag = max_lag)?)
        }
        Command::Timing {
            p_values,
            iterations,
            common,
        } => {
            let cfg = common.resolve(|p| {
                p.p_values = p_values;
                p.iterations = iterations;
            })?;
            cmd_timing(&cfg)
        }
    }
}
