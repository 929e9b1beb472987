//! Command-line experiment runner for `qwalk-core`.
//!
//! `run` and `sweep` evolve a quantum (or, with `--classical`, a classical
//! multi-map) walk and tabulate m.s.d., entropy and participation ratio per
//! time step. `phase-space` samples trajectories of a single cell map.

pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use qwalk_core::{classical_msd_series, phase_portrait, run_time_series, WalkTimeSeries};

pub use config::{ExperimentConfig, PhaseSpaceConfig, RawSettings};
pub use error::CliError;
pub use output::Record;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Coined quantum walks with chaotic coins")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a walk and print observables per time step.
    Run(RunArgs),
    /// Same as `run`, but at least one `--sweep` is required.
    Sweep(RunArgs),
    /// Sample trajectories of a classical cell map.
    PhaseSpace(PhaseArgs),
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` settings file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Coin: dft, harper or baker.
    #[arg(long)]
    pub coin: Option<String>,
    /// Coin dimension (even).
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Number of lattice sites.
    #[arg(long = "L")]
    pub l: Option<String>,
    /// Harper kick strength.
    #[arg(long)]
    pub g: Option<String>,
    /// Harper time step.
    #[arg(long)]
    pub tau: Option<String>,
    /// Boundary phase in [0, 1); defaults to 0.5 for the baker coin, 0 otherwise.
    #[arg(long)]
    pub phi: Option<String>,
    /// Last time step recorded.
    #[arg(long = "t-max")]
    pub t_max: Option<String>,
    /// Cell partition: horizontal or vertical.
    #[arg(long)]
    pub partition: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; stdout when absent or `-`.
    #[arg(long)]
    pub out: Option<String>,
    /// Seed for the classical point ensemble.
    #[arg(long)]
    pub seed: Option<String>,
    /// Run the classical multi-map walk instead of the quantum walk.
    #[arg(long)]
    pub classical: bool,
    /// Number of phase-space points in the classical ensemble.
    #[arg(long = "n-points")]
    pub n_points: Option<String>,
    /// Append the full site distribution to every record.
    #[arg(long = "emit-distributions")]
    pub emit_distributions: bool,
    /// Sweep a parameter over a list, e.g. `--sweep g=0.05,2`. Repeatable;
    /// several sweeps run over their Cartesian product.
    #[arg(long, value_name = "NAME=V1,V2,...")]
    pub sweep: Vec<String>,
}

#[derive(Debug, Default, Args)]
pub struct PhaseArgs {
    /// Flat `key = value` settings file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Map: rotation, baker or harper.
    #[arg(long)]
    pub map: Option<String>,
    /// Harper kick strength.
    #[arg(long)]
    pub g: Option<String>,
    /// Harper time step.
    #[arg(long)]
    pub tau: Option<String>,
    /// Number of trajectories.
    #[arg(long)]
    pub trajectories: Option<String>,
    /// Points per trajectory, including the starting point.
    #[arg(long)]
    pub steps: Option<String>,
    /// Seed for the starting points.
    #[arg(long)]
    pub seed: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; stdout when absent or `-`.
    #[arg(long)]
    pub out: Option<String>,
}

fn load(path: &Option<PathBuf>) -> Result<RawSettings, CliError> {
    path.as_deref().map_or_else(|| Ok(RawSettings::default()), RawSettings::parse_file)
}

fn overlay(raw: &mut RawSettings, pairs: &[(&str, &Option<String>)]) {
    for (key, value) in pairs {
        if let Some(v) = value {
            raw.set(key, v.as_str());
        }
    }
}

impl RunArgs {
    pub fn settings(&self) -> Result<RawSettings, CliError> {
        let mut cli = RawSettings::default();
        overlay(
            &mut cli,
            &[
                ("coin", &self.coin),
                ("M", &self.m),
                ("L", &self.l),
                ("g", &self.g),
                ("tau", &self.tau),
                ("phi", &self.phi),
                ("t-max", &self.t_max),
                ("partition", &self.partition),
                ("format", &self.format),
                ("out", &self.out),
                ("seed", &self.seed),
                ("n-points", &self.n_points),
            ],
        );
        if self.classical {
            cli.set("classical", "true");
        }
        if self.emit_distributions {
            cli.set("emit-distributions", "true");
        }
        for s in &self.sweep {
            cli.add_sweep_arg(s)?;
        }
        Ok(load(&self.config)?.merge(cli))
    }
}

impl PhaseArgs {
    pub fn settings(&self) -> Result<RawSettings, CliError> {
        let mut cli = RawSettings::default();
        overlay(
            &mut cli,
            &[
                ("map", &self.map),
                ("g", &self.g),
                ("tau", &self.tau),
                ("trajectories", &self.trajectories),
                ("steps", &self.steps),
                ("seed", &self.seed),
                ("format", &self.format),
                ("out", &self.out),
            ],
        );
        Ok(load(&self.config)?.merge(cli))
    }
}

fn series_records(point: &[(config::SweepParam, f64)], series: WalkTimeSeries, keep: bool) -> Vec<Record> {
    let mut dists = series.distributions.filter(|_| keep).map(Vec::into_iter);
    (0..series.times.len())
        .map(|i| Record {
            point: point.to_vec(),
            time: series.times[i],
            msd: series.msd[i],
            entropy: series.entropy[i],
            pr: series.pr[i],
            probs: dists.as_mut().and_then(Iterator::next).map(|d| d.probs().to_vec()),
        })
        .collect()
}

/// Evaluate every sweep point (in parallel) and return the records ordered by
/// sweep point, then time.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Record>, CliError> {
    let points = cfg.sweep_points();
    let per_point: Vec<Result<Vec<Record>, CliError>> = points
        .par_iter()
        .map(|point| {
            let walk = cfg.walk_at(point);
            let series = match &cfg.classical {
                Some(c) => {
                    let map = walk.coin.classical_map();
                    classical_msd_series(&map, &c.partition, walk.sites, cfg.t_max, c.n_points, c.seed)?
                }
                None => run_time_series(&walk, cfg.t_max)?,
            };
            Ok(series_records(point, series, cfg.emit_distributions))
        })
        .collect();
    let mut records = Vec::new();
    for r in per_point {
        records.extend(r?);
    }
    Ok(records)
}

pub fn run_command(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) | Command::Sweep(args) => {
            let cfg = ExperimentConfig::resolve(&args.settings()?)?;
            if matches!(command, Command::Sweep(_)) && cfg.sweep.is_empty() {
                return Err(CliError::config("sweep", "the sweep command needs at least one --sweep"));
            }
            let records = run_experiment(&cfg)?;
            output::emit(&cfg.output, &output::render_experiment(&cfg, &records)?)
        }
        Command::PhaseSpace(args) => {
            let cfg = PhaseSpaceConfig::resolve(&args.settings()?)?;
            let points = phase_portrait(&cfg.map, cfg.trajectories, cfg.steps, cfg.seed);
            output::emit(&cfg.output, &output::render_phase_space(&cfg, &points)?)
        }
    }
}
