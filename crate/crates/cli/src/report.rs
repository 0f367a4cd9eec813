//! Trace CSV and summary JSON.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use wconsensus_core::engine::RunTrace;
use wconsensus_core::{IterationMatrix, SpectralPrediction, WeightedSystem};

/// Above this many nodes, traces and summaries omit full state vectors.
pub const FULL_STATE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub m: usize,
    pub strongly_connected: bool,
    pub undirected: bool,
    pub epsilon: f64,
    /// `None` when no node has an out-edge.
    pub epsilon_bound: Option<f64>,
    pub certified: bool,
    pub predicted_alpha: Option<f64>,
    pub v: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_state: Option<Vec<f64>>,
    pub final_disagreement: f64,
    /// `max_i |x_i - predicted_alpha|` at the last step.
    pub alpha_error: Option<f64>,
    pub conserved_drift: Option<f64>,
    pub converged_at: Option<usize>,
    pub steps_run: usize,
    pub mode: String,
}

impl Summary {
    pub fn new(
        system: &WeightedSystem,
        matrix: &IterationMatrix,
        prediction: Option<&SpectralPrediction>,
        trace: &RunTrace,
        mode: &str,
    ) -> Self {
        let n = system.node_count();
        let bound = matrix.bound();
        Self {
            n,
            m: system.graph().edge_count(),
            strongly_connected: matrix.is_strongly_connected(),
            undirected: system.graph().is_undirected(),
            epsilon: matrix.epsilon(),
            epsilon_bound: bound.is_finite().then_some(bound),
            certified: matrix.is_certified(),
            predicted_alpha: prediction.map(|p| p.alpha),
            v: prediction.map(|p| p.v.clone()),
            final_state: (n <= FULL_STATE_LIMIT).then(|| trace.final_state.clone()),
            final_disagreement: trace.final_disagreement,
            alpha_error: trace.alpha_error(),
            conserved_drift: trace.conserved_drift,
            converged_at: trace.converged_at,
            steps_run: trace.steps_run,
            mode: mode.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is serializable")
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_string()
    } else {
        x.to_string()
    }
}

/// Writes `step,disagreement,conserved,x_0,...` (or `...,min,max` for large n).
pub fn write_trace_csv<W: Write>(out: &mut W, trace: &RunTrace, n: usize) -> io::Result<()> {
    let full = n <= FULL_STATE_LIMIT;
    let mut header = String::from("step,disagreement,conserved");
    if full {
        for i in 0..n {
            header.push_str(&format!(",x_{i}"));
        }
    } else {
        header.push_str(",min,max");
    }
    writeln!(out, "{header}")?;

    let mut line = String::new();
    for snap in &trace.snapshots {
        line.clear();
        line.push_str(&snap.step.to_string());
        line.push(',');
        line.push_str(&fmt_f64(snap.disagreement));
        line.push(',');
        if let Some(c) = snap.conserved {
            line.push_str(&fmt_f64(c));
        }
        if full {
            for &x in &snap.state {
                line.push(',');
                line.push_str(&fmt_f64(x));
            }
        } else {
            let lo = snap.state.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = snap.state.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            line.push(',');
            line.push_str(&fmt_f64(lo));
            line.push(',');
            line.push_str(&fmt_f64(hi));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
