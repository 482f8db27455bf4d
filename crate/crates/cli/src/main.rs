//! `wehrl`: tables of Wehrl entropies, uncertainty relations and Wehrl
//! mutual information, as CSV or JSON.
//!
//! Exit codes: 0 success, 2 quadrature tolerance not reached, 3 invalid input.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use wehrl::quadrature::{QuadratureSpec, Strategy};

use output::Format;

/// Rejected user input; maps to exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

const EXIT_TOLERANCE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "wehrl", version, about = "Phase-space entropies of quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Output encoding.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for quadrature and sweeps.
    #[arg(long, global = true, env = "WEHRL_PARALLELISM")]
    parallelism: Option<usize>,

    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    quadrature: QuadratureOverrides,
}

#[derive(Debug, Clone, Default, Args)]
struct QuadratureOverrides {
    #[arg(long, global = true, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    #[arg(long, global = true)]
    radial_nodes: Option<usize>,
    #[arg(long, global = true)]
    angular_nodes: Option<usize>,
    #[arg(long, global = true)]
    cartesian_nodes: Option<usize>,
    #[arg(long, global = true)]
    radial_cutoff: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    max_doublings: Option<u32>,
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| "expected auto, radial-1d, polar-2d, polar-reduced-3d or tensor-cartesian".to_string())
}

impl QuadratureOverrides {
    fn apply(&self, spec: &mut QuadratureSpec) {
        if let Some(s) = self.strategy {
            spec.strategy = s;
        }
        if let Some(n) = self.radial_nodes {
            spec.radial_nodes = n;
        }
        if let Some(n) = self.angular_nodes {
            spec.angular_nodes = n;
        }
        if let Some(n) = self.cartesian_nodes {
            spec.cartesian_nodes_per_dim = n;
        }
        if let Some(r) = self.radial_cutoff {
            spec.radial_cutoff = Some(r);
        }
        if let Some(t) = self.abs_tol {
            spec.abs_tol = t;
        }
        if let Some(t) = self.rel_tol {
            spec.rel_tol = t;
        }
        if let Some(m) = self.max_doublings {
            spec.max_doublings = m;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
enum Command {
    /// Uncertainty relations for Fock states n = 0…n_max.
    EurFock {
        #[arg(long, default_value_t = 10)]
        #[serde(default = "default_fock_n_max")]
        n_max: u32,
        /// Add the large-n approximations as extra columns.
        #[arg(long)]
        #[serde(default)]
        asymptotics: bool,
    },
    /// Uncertainty relations for q|0⟩⟨0| + (1−q)|1⟩⟨1|.
    EurMixture {
        #[arg(long, default_value_t = wehrl::eur::DEFAULT_MIXTURE_STEPS)]
        #[serde(default = "default_mixture_steps")]
        steps: usize,
    },
    /// Uncertainty relations for thermal states on a log-spaced βω grid.
    EurThermal {
        #[arg(long, default_value_t = wehrl::eur::DEFAULT_THERMAL_GRID.0)]
        #[serde(default = "default_beta_min")]
        beta_min: f64,
        #[arg(long, default_value_t = wehrl::eur::DEFAULT_THERMAL_GRID.1)]
        #[serde(default = "default_beta_max")]
        beta_max: f64,
        #[arg(long, default_value_t = wehrl::eur::DEFAULT_THERMAL_GRID.2)]
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Wehrl mutual information of the two-mode squeezed state.
    BipartiteTmss {
        /// Comma-separated λ values.
        #[arg(long, default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        #[serde(default = "default_lambda_grid")]
        lambda_grid: String,
    },
    /// Wehrl mutual information of N00N states N = 0…n_max.
    BipartiteNoon {
        #[arg(long, default_value_t = 10)]
        #[serde(default = "default_noon_n_max")]
        n_max: u32,
    },
    /// Report on a Gaussian state given by its covariance matrix.
    Gaussian {
        /// JSON array of rows, or CSV, ordered (x_A…, p_A…, x_B…, p_B…).
        #[arg(long)]
        cov: PathBuf,
        /// Modes in A and B; defaults to a single subsystem.
        #[arg(long, num_args = 2, value_names = ["N", "M"])]
        #[serde(default)]
        partition: Option<Vec<usize>>,
    },
    /// Entropy report for a state given as JSON, e.g. '{"kind":"fock","n":3}'.
    Entropy {
        #[arg(long)]
        state: String,
    },
}

fn default_fock_n_max() -> u32 {
    10
}
fn default_mixture_steps() -> usize {
    wehrl::eur::DEFAULT_MIXTURE_STEPS
}
fn default_beta_min() -> f64 {
    wehrl::eur::DEFAULT_THERMAL_GRID.0
}
fn default_beta_max() -> f64 {
    wehrl::eur::DEFAULT_THERMAL_GRID.1
}
fn default_points() -> usize {
    wehrl::eur::DEFAULT_THERMAL_GRID.2
}
fn default_lambda_grid() -> String {
    "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9".to_string()
}
fn default_noon_n_max() -> u32 {
    10
}

/// Everything a run needs; also the schema of `--config` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
struct RunConfig {
    command: Option<Command>,
    quadrature: QuadratureSpec,
    output: Option<PathBuf>,
    format: Format,
    parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            quadrature: QuadratureSpec::default(),
            output: None,
            format: Format::Csv,
            parallelism: 1,
        }
    }
}

fn resolve(cli: Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| InputError(format!("config file: {e}")))?
        }
        None => RunConfig::default(),
    };
    if cli.command.is_some() {
        config.command = cli.command;
    }
    if let Some(f) = cli.format {
        config.format = f;
    }
    if cli.output.is_some() {
        config.output = cli.output;
    }
    if let Some(p) = cli.parallelism {
        config.parallelism = p;
    }
    cli.quadrature.apply(&mut config.quadrature);
    if config.parallelism == 0 {
        return Err(InputError("parallelism must be at least 1".into()).into());
    }
    config.quadrature.parallelism = config.parallelism;
    config
        .quadrature
        .validate()
        .map_err(|e| InputError(e.to_string()))?;
    Ok(config)
}

fn run(config: &RunConfig) -> Result<()> {
    let qs = &config.quadrature;
    let command = config
        .command
        .as_ref()
        .ok_or_else(|| InputError("no command given (see --help)".into()))?;
    let rendered = match command {
        Command::EurFock { n_max, asymptotics } => commands::eur_fock(*n_max, *asymptotics, qs)?,
        Command::EurMixture { steps } => commands::eur_mixture(*steps, qs)?,
        Command::EurThermal {
            beta_min,
            beta_max,
            points,
        } => commands::eur_thermal(*beta_min, *beta_max, *points, qs)?,
        Command::BipartiteTmss { lambda_grid } => {
            commands::bipartite_tmss(&commands::parse_grid(lambda_grid)?, qs)?
        }
        Command::BipartiteNoon { n_max } => commands::bipartite_noon(*n_max, qs)?,
        Command::Gaussian { cov, partition } => {
            let partition = match partition.as_deref() {
                None => None,
                Some([n, m]) => Some((*n, *m)),
                Some(_) => return Err(InputError("--partition takes two values".into()).into()),
            };
            commands::gaussian_report(cov, partition, qs)?
        }
        Command::Entropy { state } => commands::entropy(state, qs)?,
    };
    output::emit(&rendered, config.format, config.output.as_deref())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<InputError>().is_some() {
            return EXIT_INPUT;
        }
        if let Some(e) = cause.downcast_ref::<wehrl::Error>() {
            return match e {
                wehrl::Error::ToleranceNotReached { .. } => EXIT_TOLERANCE,
                _ => EXIT_INPUT,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match resolve(cli).and_then(|config| run(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
