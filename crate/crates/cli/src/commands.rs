use std::fs;
use std::io::Write;

use wconsensus_core::agents::Simulator;
use wconsensus_core::engine::{drive, Stepper};
use wconsensus_core::{IterationMatrix, SpectralPrediction};

use crate::config::{Command, ExperimentArgs, ExperimentConfig, Mode};
use crate::report::{fmt_f64, write_trace_csv, Summary};
use crate::CliError;

/// Size of the state nudge applied by `--perturb-agent`.
const PERTURBATION: f64 = 1e-6;

pub fn dispatch<W: Write>(command: &Command, out: &mut W) -> Result<(), CliError> {
    match command {
        Command::Check(args) => cmd_check(&load(args)?, out),
        Command::Run(args) => cmd_run(&load(args)?, out).map(|_| ()),
        Command::Compare(args) => cmd_compare(&load(args)?, out),
    }
}

fn load(args: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::load(args)
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn join(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
    format!("[{}]", parts.join(", "))
}

/// Prints structure and prediction; fails with a hypothesis error when the
/// configured step size is not certified.
pub fn cmd_check<W: Write>(config: &ExperimentConfig, out: &mut W) -> Result<(), CliError> {
    let sys = &config.system;
    let g = sys.graph();
    let degrees = sys.degrees();
    let matrix = sys.iteration_matrix(config.epsilon)?;
    let bound = matrix.bound();

    writeln!(out, "nodes: {}", g.node_count()).map_err(io_err)?;
    writeln!(out, "edges: {}", g.edge_count()).map_err(io_err)?;
    writeln!(out, "strongly_connected: {}", matrix.is_strongly_connected()).map_err(io_err)?;
    writeln!(out, "undirected: {}", g.is_undirected()).map_err(io_err)?;
    writeln!(out, "out_degree_range: {}..{}", degrees.min(), degrees.max()).map_err(io_err)?;
    writeln!(out, "epsilon_bound: {}", fmt_f64(bound)).map_err(io_err)?;
    writeln!(out, "epsilon: {}", fmt_f64(config.epsilon)).map_err(io_err)?;
    writeln!(out, "certified: {}", matrix.is_certified()).map_err(io_err)?;

    if !matrix.is_strongly_connected() {
        return Err(CliError::Hypothesis("not strongly connected".into()));
    }
    let prediction = sys.predict(&config.x0, config.epsilon)?;
    writeln!(out, "predicted_alpha: {}", fmt_f64(prediction.alpha)).map_err(io_err)?;
    writeln!(out, "v: {}", join(&prediction.v)).map_err(io_err)?;
    writeln!(out, "rho_estimate: {}", fmt_f64(prediction.rho_estimate)).map_err(io_err)?;

    if !matrix.is_certified() {
        return Err(CliError::Hypothesis(format!(
            "epsilon {} is not below the bound {}",
            fmt_f64(config.epsilon),
            fmt_f64(bound)
        )));
    }
    Ok(())
}

fn certified_matrix(config: &ExperimentConfig) -> Result<IterationMatrix, CliError> {
    let matrix = config.system.iteration_matrix(config.epsilon)?;
    if !matrix.is_certified() && !config.options.allow_uncertified {
        let reason = if matrix.is_strongly_connected() {
            format!(
                "epsilon {} is not below the bound {}",
                fmt_f64(config.epsilon),
                fmt_f64(matrix.bound())
            )
        } else {
            "not strongly connected".to_string()
        };
        return Err(CliError::Hypothesis(format!(
            "{reason}; pass --allow-uncertified to run anyway"
        )));
    }
    Ok(matrix)
}

fn prediction(
    config: &ExperimentConfig,
    matrix: &IterationMatrix,
) -> Result<Option<SpectralPrediction>, CliError> {
    if matrix.is_strongly_connected() {
        Ok(Some(config.system.predict(&config.x0, config.epsilon)?))
    } else {
        Ok(None)
    }
}

/// Iterates in the configured mode, writes outputs, and prints the summary.
pub fn cmd_run<W: Write>(config: &ExperimentConfig, out: &mut W) -> Result<Summary, CliError> {
    let sys = &config.system;
    let matrix = certified_matrix(config)?;
    let prediction = prediction(config, &matrix)?;

    let trace = match config.mode {
        Mode::Matrix => {
            let mut stepper = matrix.stepper(config.x0.clone());
            drive(&mut stepper, prediction.as_ref(), &config.options)?
        }
        Mode::Agents => {
            let mut sim = Simulator::new(sys, &config.x0, config.epsilon)?;
            drive(&mut sim, prediction.as_ref(), &config.options)?
        }
    };
    let summary = Summary::new(sys, &matrix, prediction.as_ref(), &trace, config.mode.as_str());

    if let Some(dir) = &config.output_path {
        fs::create_dir_all(dir).map_err(io_err)?;
        let mut csv = Vec::new();
        write_trace_csv(&mut csv, &trace, sys.node_count()).map_err(io_err)?;
        fs::write(dir.join("trace.csv"), csv).map_err(io_err)?;
        fs::write(dir.join("summary.json"), summary.to_json() + "\n").map_err(io_err)?;
    }
    writeln!(out, "{}", summary.to_json()).map_err(io_err)?;

    if !trace.converged() {
        return Err(CliError::NonConvergence {
            steps: trace.steps_run,
            disagreement: trace.final_disagreement,
        });
    }
    Ok(summary)
}

/// Steps the matrix and agent paths side by side and compares every state bit for bit.
pub fn cmd_compare<W: Write>(config: &ExperimentConfig, out: &mut W) -> Result<(), CliError> {
    let matrix = certified_matrix(config)?;
    let mut dense = matrix.stepper(config.x0.clone());
    let mut sim = Simulator::new(&config.system, &config.x0, config.epsilon)?;
    if let Some(node) = config.perturb_agent {
        sim.inject_fault(node, 1, PERTURBATION);
    }

    let mut step = 0;
    loop {
        let (a, b) = (dense.state(), sim.state());
        if let Some(node) = (0..a.len()).find(|&i| a[i].to_bits() != b[i].to_bits()) {
            return Err(CliError::Mismatch {
                step,
                node,
                matrix: a[node],
                agents: b[node],
            });
        }
        let gap = wconsensus_core::engine::disagreement(a);
        if gap < config.options.tol || step >= config.options.max_steps {
            break;
        }
        dense.advance()?;
        sim.advance()?;
        step += 1;
    }
    writeln!(out, "pass: matrix and agent states identical over {step} steps").map_err(io_err)?;
    Ok(())
}
