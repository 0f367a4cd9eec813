use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },

    #[error("line {line}: duplicate edge {from} -> {to}")]
    DuplicateEdge { line: usize, from: usize, to: usize },

    #[error("line {line}: node index {index} is out of range for {n} nodes")]
    IndexOutOfRange { line: usize, index: usize, n: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("weight {index} is {value}, weights must be positive and finite")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("step size {0} must be positive and finite")]
    NonPositiveEpsilon(f64),

    #[error("expected a one-dimensional null space, found {free} free columns")]
    RankDeficiency { free: usize },

    #[error("null vector residual {residual:e} exceeds tolerance {tolerance:e}")]
    NullResidual { residual: f64, tolerance: f64 },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("graph is not undirected")]
    NotUndirected,

    #[error("left null vector has non-positive entry {value:e} at node {index}")]
    NotPositive { index: usize, value: f64 },

    #[error("step size {epsilon} is not certified (bound {bound}, strongly connected: {strongly_connected})")]
    Uncertified {
        epsilon: f64,
        bound: f64,
        strongly_connected: bool,
    },

    #[error("agent {agent} has no message from neighbor {neighbor}")]
    MissingMessage { agent: usize, neighbor: usize },

    #[error("invalid option: {0}")]
    InvalidOption(String),
}
