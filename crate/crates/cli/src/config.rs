use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use wconsensus_core::engine::RunOptions;
use wconsensus_core::graph::parse_edge_list;
use wconsensus_core::{Digraph, WeightedSystem};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "wconsensus", version, about = "Weighted-average consensus on directed graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report graph structure, the step-size bound, and the predicted consensus.
    Check(ExperimentArgs),
    /// Iterate to consensus and write a trace and summary.
    Run(ExperimentArgs),
    /// Run the matrix and agent paths in lockstep and require identical states.
    Compare(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Matrix,
    Agents,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Matrix => "matrix",
            Mode::Agents => "agents",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Node weights, one per line (default: all ones).
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Initial state, one value per line (default: seeded uniform [0, 1)).
    #[arg(long)]
    pub x0: Option<PathBuf>,
    /// Step size (default: 0.9 times the bound).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: usize,
    #[arg(long, value_enum, default_value_t = Mode::Matrix)]
    pub mode: Mode,
    /// Run even when the step size or graph is outside the convergence guarantee.
    #[arg(long)]
    pub allow_uncertified: bool,
    /// Directory for trace.csv and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub snapshots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Perturb this agent's state after the first round (fault injection).
    #[arg(long, hide = true)]
    pub perturb_agent: Option<usize>,
}

/// Fully loaded experiment: the system, start state, and run settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub system: WeightedSystem,
    pub x0: Vec<f64>,
    pub epsilon: f64,
    pub options: RunOptions,
    pub mode: Mode,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    pub perturb_agent: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(args: &ExperimentArgs) -> Result<Self, CliError> {
        let options = RunOptions {
            tol: args.tol,
            max_steps: args.max_steps,
            snapshot_limit: args.snapshots,
            allow_uncertified: args.allow_uncertified,
        };
        options.validate().map_err(|e| CliError::Input(e.to_string()))?;
        if let Some(eps) = args.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(CliError::Input(format!("--epsilon must be positive, got {eps}")));
            }
        }

        let graph = load_graph(&args.graph)?;
        let n = graph.node_count();
        let weights = match &args.weights {
            Some(path) => load_values(path, n)?,
            None => vec![1.0; n],
        };
        let system = WeightedSystem::new(graph, weights)?;
        let x0 = match &args.x0 {
            Some(path) => load_values(path, n)?,
            None => default_state(n, args.seed),
        };
        let epsilon = args.epsilon.unwrap_or_else(|| system.default_epsilon());
        if let Some(node) = args.perturb_agent {
            if node >= n {
                return Err(CliError::Input(format!("--perturb-agent {node} out of range")));
            }
        }

        Ok(Self {
            system,
            x0,
            epsilon,
            options,
            mode: args.mode,
            output_path: args.out.clone(),
            seed: args.seed,
            perturb_agent: args.perturb_agent,
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_graph(path: &Path) -> Result<Digraph, CliError> {
    parse_edge_list(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads one decimal per line; blank lines and `#` comments are skipped.
pub fn load_values(path: &Path, expected: usize) -> Result<Vec<f64>, CliError> {
    let values = parse_values(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if values.len() != expected {
        return Err(CliError::Input(format!(
            "{}: expected {expected} values, found {}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| match l.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("line {line}: `{l}` is not a finite number")),
        })
        .collect()
}

/// Uniform `[0, 1)` start state from a SplitMix64 stream.
pub fn default_state(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>()).collect()
}
