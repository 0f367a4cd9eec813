//! Weighted systems, the iteration matrix `P_w = I - eps * W^-1 L`, spectral
//! prediction of the consensus value, and the iteration driver.

use crate::error::{Error, Result};
use crate::graph::{DegreeVector, Digraph, LaplacianMatrix};
use crate::linalg::{self, DenseMatrix};

/// Fraction of the step-size bound used when no step size is given.
pub const DEFAULT_EPSILON_FRACTION: f64 = 0.9;

/// Power-iteration budget for the dominant-eigenvalue estimate.
const RHO_MAX_ITER: usize = 100_000;
const RHO_TOL: f64 = 1e-14;

/// A digraph together with positive node weights and the derived matrices.
#[derive(Debug, Clone)]
pub struct WeightedSystem {
    graph: Digraph,
    weights: Vec<f64>,
    degrees: DegreeVector,
    laplacian: LaplacianMatrix,
    weighted_laplacian: DenseMatrix,
}

impl WeightedSystem {
    pub fn new(graph: Digraph, weights: Vec<f64>) -> Result<Self> {
        let n = graph.node_count();
        if weights.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: weights.len(),
            });
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::NonPositiveWeight { index, value });
        }
        let degrees = graph.out_degrees();
        let laplacian = graph.laplacian();
        let weighted_laplacian =
            DenseMatrix::from_fn(n, |i, j| laplacian.get(i, j) as f64 / weights[i]);
        Ok(Self {
            graph,
            weights,
            degrees,
            laplacian,
            weighted_laplacian,
        })
    }

    /// Unit weights: plain (unweighted) average consensus.
    pub fn unweighted(graph: Digraph) -> Self {
        let n = graph.node_count();
        Self::new(graph, vec![1.0; n]).expect("unit weights are valid")
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degrees(&self) -> &DegreeVector {
        &self.degrees
    }

    pub fn laplacian(&self) -> &LaplacianMatrix {
        &self.laplacian
    }

    /// `L_w = W^-1 L`.
    pub fn weighted_laplacian(&self) -> &DenseMatrix {
        &self.weighted_laplacian
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// `min_i w_i / d_i`, with sinks (`d_i = 0`) imposing no constraint.
    ///
    /// Infinite when no node has an out-edge.
    pub fn epsilon_bound(&self) -> f64 {
        self.weights
            .iter()
            .zip(self.degrees.as_slice())
            .filter(|(_, &d)| d > 0)
            .map(|(w, &d)| w / d as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// `0.9 * epsilon_bound()`, or `1.0` for a graph without edges.
    pub fn default_epsilon(&self) -> f64 {
        let bound = self.epsilon_bound();
        if bound.is_finite() {
            DEFAULT_EPSILON_FRACTION * bound
        } else {
            1.0
        }
    }

    /// Builds `P_w = I - eps * L_w`.
    ///
    /// Entries are formed from the per-node gain `eps / w_i`, computed before
    /// anything else: `P_ij = gain_i * a_ij` and `P_ii = 1 - gain_i * d_i`.
    pub fn iteration_matrix(&self, epsilon: f64) -> Result<IterationMatrix> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        let n = self.node_count();
        let mut p = DenseMatrix::zeros(n);
        for i in 0..n {
            let gain = epsilon / self.weights[i];
            p.set(i, i, 1.0 - gain * self.degrees.as_slice()[i] as f64);
            for &j in self.graph.neighbors(i) {
                p.set(i, j, gain * 1.0);
            }
        }
        let bound = self.epsilon_bound();
        let strongly_connected = self.graph.is_strongly_connected();
        Ok(IterationMatrix {
            p,
            epsilon,
            bound,
            strongly_connected,
            certified: epsilon < bound && strongly_connected,
        })
    }

    /// Predicts the consensus value from the positive left null vector of `L_w`.
    ///
    /// `epsilon` only affects `rho_estimate`; when it is not certified the
    /// default step size is used for the estimate instead.
    pub fn predict(&self, x0: &[f64], epsilon: f64) -> Result<SpectralPrediction> {
        check_state(self.node_count(), x0)?;
        if !self.graph.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        let v = self.left_null_vector()?;
        let alpha = linalg::dot(&v, x0) / linalg::l1_norm(&v);

        let mut matrix = self.iteration_matrix(epsilon)?;
        if !matrix.certified {
            matrix = self.iteration_matrix(self.default_epsilon())?;
        }
        let n = self.node_count();
        let start = vec![1.0 / n as f64; n];
        let power = linalg::power_iteration(&matrix.p.transpose(), &start, RHO_MAX_ITER, RHO_TOL)?;

        Ok(SpectralPrediction {
            v,
            alpha,
            rho_estimate: power.eigenvalue,
            power_vector: power.eigenvector,
            power_converged: power.converged,
        })
    }

    /// `v` with `L_w^T v = 0`, `||v||_1 = 1`, checked entrywise positive.
    pub fn left_null_vector(&self) -> Result<Vec<f64>> {
        let v = linalg::null_vector(&self.weighted_laplacian.transpose())?;
        if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| **x <= 0.0) {
            return Err(Error::NotPositive { index, value });
        }
        Ok(v)
    }

    /// The limit `T = e v^T` of `P_w^k`: every row equals `v^T`.
    pub fn limit_matrix(&self, epsilon: f64) -> Result<DenseMatrix> {
        let matrix = self.iteration_matrix(epsilon)?;
        if !matrix.strongly_connected {
            return Err(Error::NotStronglyConnected);
        }
        if !matrix.certified {
            return Err(matrix.uncertified());
        }
        let v = self.left_null_vector()?;
        Ok(DenseMatrix::from_fn(self.node_count(), |_, j| v[j]))
    }

    /// `sum_i w_i x_i / sum_i w_i`, valid for connected undirected graphs.
    pub fn undirected_alpha(&self, x0: &[f64]) -> Result<f64> {
        check_state(self.node_count(), x0)?;
        if !self.graph.is_undirected() {
            return Err(Error::NotUndirected);
        }
        if !self.graph.is_strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        Ok(linalg::dot(&self.weights, x0) / self.weights.iter().sum::<f64>())
    }

    /// Iterates `x^{k+1} = P_w x^k` from `x0`.
    pub fn run(&self, x0: &[f64], epsilon: f64, options: &RunOptions) -> Result<RunTrace> {
        options.validate()?;
        check_state(self.node_count(), x0)?;
        let matrix = self.iteration_matrix(epsilon)?;
        if !matrix.certified && !options.allow_uncertified {
            return Err(matrix.uncertified());
        }
        let prediction = if matrix.strongly_connected {
            Some(self.predict(x0, epsilon)?)
        } else {
            None
        };
        let mut stepper = matrix.stepper(x0.to_vec());
        drive(&mut stepper, prediction.as_ref(), options)
    }
}

fn check_state(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if let Some(index) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// `P_w` with its step size and certification status.
#[derive(Debug, Clone)]
pub struct IterationMatrix {
    p: DenseMatrix,
    epsilon: f64,
    bound: f64,
    strongly_connected: bool,
    certified: bool,
}

impl IterationMatrix {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `epsilon < min w_i / d_i` and the graph is strongly connected.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.strongly_connected
    }

    fn uncertified(&self) -> Error {
        Error::Uncertified {
            epsilon: self.epsilon,
            bound: self.bound,
            strongly_connected: self.strongly_connected,
        }
    }

    /// One application of `P_w`, written to `out`.
    ///
    /// Each row is evaluated as `x_i + sum_{j != i} P_ij (x_j - x_i)` with
    /// `j` ascending and zero entries skipped. This equals `(P_w x)_i`
    /// because the rows of `P_w` sum to one, keeps a consensus state
    /// exactly fixed, and is the same arithmetic an agent performs locally.
    pub fn step(&self, x: &[f64], out: &mut [f64]) {
        let n = self.p.dim();
        debug_assert!(x.len() == n && out.len() == n);
        for (i, row) in self.p.rows().enumerate() {
            let xi = x[i];
            let mut acc = 0.0;
            for (j, &pij) in row.iter().enumerate() {
                if j != i && pij != 0.0 {
                    acc += pij * (x[j] - xi);
                }
            }
            out[i] = xi + acc;
        }
    }

    pub fn stepper(&self, x0: Vec<f64>) -> MatrixStepper<'_> {
        let next = vec![0.0; x0.len()];
        MatrixStepper {
            matrix: self,
            state: x0,
            next,
        }
    }
}

/// Something that advances a state vector one synchronous step at a time.
pub trait Stepper {
    fn state(&self) -> &[f64];
    fn advance(&mut self) -> Result<()>;
}

/// [`Stepper`] over a dense iteration matrix.
#[derive(Debug)]
pub struct MatrixStepper<'a> {
    matrix: &'a IterationMatrix,
    state: Vec<f64>,
    next: Vec<f64>,
}

impl Stepper for MatrixStepper<'_> {
    fn state(&self) -> &[f64] {
        &self.state
    }

    fn advance(&mut self) -> Result<()> {
        self.matrix.step(&self.state, &mut self.next);
        std::mem::swap(&mut self.state, &mut self.next);
        Ok(())
    }
}

/// Left null vector of `L_w`, the consensus value it predicts, and the
/// power-iteration cross-check on `P_w^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPrediction {
    /// Positive, unit l1 norm.
    pub v: Vec<f64>,
    /// `v^T x0 / ||v||_1`.
    pub alpha: f64,
    /// Rayleigh-quotient estimate of the dominant eigenvalue of `P_w^T`.
    pub rho_estimate: f64,
    /// Power-iteration eigenvector of `P_w^T`, unit l1 norm.
    pub power_vector: Vec<f64>,
    pub power_converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Stop once `max_i x_i - min_i x_i < tol`.
    pub tol: f64,
    pub max_steps: usize,
    /// Upper bound on recorded snapshots, first and last included.
    pub snapshot_limit: usize,
    /// Permit iterating outside the certified regime.
    pub allow_uncertified: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_steps: 1_000_000,
            snapshot_limit: 1000,
            allow_uncertified: false,
        }
    }
}

impl RunOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidOption(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_steps < 1 {
            return Err(Error::InvalidOption("max_steps must be at least 1".into()));
        }
        if self.snapshot_limit < 2 {
            return Err(Error::InvalidOption(
                "snapshot limit must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Recorded state at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub disagreement: f64,
    /// `v^T x^k`, when a prediction is available.
    pub conserved: Option<f64>,
    pub state: Vec<f64>,
}

/// Downsampled record of a run plus summary diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub snapshots: Vec<Snapshot>,
    /// First step whose disagreement fell below the tolerance.
    pub converged_at: Option<usize>,
    pub steps_run: usize,
    pub final_state: Vec<f64>,
    pub final_disagreement: f64,
    pub predicted_alpha: Option<f64>,
    /// `max_k |v^T x^k - v^T x^0| / sum_i |v_i x0_i|`.
    pub conserved_drift: Option<f64>,
}

impl RunTrace {
    pub fn converged(&self) -> bool {
        self.converged_at.is_some()
    }

    /// Midpoint of the final state's range.
    pub fn final_value(&self) -> f64 {
        let (lo, hi) = min_max(&self.final_state);
        0.5 * (lo + hi)
    }

    /// `max_i |x_i - alpha|` at the final step.
    pub fn alpha_error(&self) -> Option<f64> {
        self.predicted_alpha.map(|alpha| {
            self.final_state
                .iter()
                .fold(0.0f64, |acc, x| acc.max((x - alpha).abs()))
        })
    }
}

pub fn disagreement(x: &[f64]) -> f64 {
    let (lo, hi) = min_max(x);
    hi - lo
}

pub(crate) fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// Runs `stepper` until the disagreement drops below `options.tol` or
/// `options.max_steps` steps have been taken.
///
/// Snapshots are kept on a stride that doubles whenever the buffer fills,
/// so at most `options.snapshot_limit` are retained and the first and last
/// steps are always present.
pub fn drive<S: Stepper + ?Sized>(
    stepper: &mut S,
    prediction: Option<&SpectralPrediction>,
    options: &RunOptions,
) -> Result<RunTrace> {
    options.validate()?;
    let v = prediction.map(|p| p.v.as_slice());
    let x0 = stepper.state().to_vec();
    let conserved0 = v.map(|v| linalg::dot(v, &x0));
    let scale: f64 = v
        .map(|v| v.iter().zip(&x0).map(|(a, b)| (a * b).abs()).sum())
        .unwrap_or(0.0);

    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut stride = 1usize;
    let mut max_drift = 0.0f64;
    let mut step = 0usize;
    let mut converged_at = None;
    let last: Snapshot;

    loop {
        let state = stepper.state();
        let gap = disagreement(state);
        let conserved = v.map(|v| linalg::dot(v, state));
        if let (Some(c), Some(c0)) = (conserved, conserved0) {
            max_drift = max_drift.max((c - c0).abs());
        }
        let done = gap < options.tol || step >= options.max_steps;
        if gap < options.tol {
            converged_at = Some(step);
        }
        let snap = || Snapshot {
            step,
            disagreement: gap,
            conserved,
            state: state.to_vec(),
        };
        if done {
            last = snap();
            break;
        }
        if step.is_multiple_of(stride) {
            snapshots.push(snap());
            if snapshots.len() > options.snapshot_limit - 1 {
                stride *= 2;
                snapshots.retain(|s| s.step % stride == 0);
            }
        }
        stepper.advance()?;
        step += 1;
    }

    let final_state = last.state.clone();
    let final_disagreement = last.disagreement;
    if snapshots.last().map(|s| s.step) != Some(last.step) {
        snapshots.push(last);
    }

    Ok(RunTrace {
        snapshots,
        converged_at,
        steps_run: step,
        final_state,
        final_disagreement,
        predicted_alpha: prediction.map(|p| p.alpha),
        conserved_drift: conserved0.map(|_| if scale > 0.0 { max_drift / scale } else { max_drift }),
    })
}
