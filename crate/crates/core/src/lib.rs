//! Discrete-time weighted-average consensus on directed graphs.
//!
//! The crate is split along the path a run takes:
//!
//! * [`graph`] parses edge lists and answers the structural questions
//!   (out-degrees, Laplacian, strong connectivity, symmetry).
//! * [`linalg`] is the small dense kernel: products, the l1 norm, a null
//!   vector solve, and power iteration.
//! * [`engine`] builds `P_w = I - eps * W^-1 L`, certifies the step size,
//!   predicts the consensus value from the left null vector of `L_w`, and
//!   iterates the recurrence.
//! * [`agents`] runs the same update as a round-based message-passing
//!   simulation that matches the matrix path bit for bit.

pub mod agents;
pub mod engine;
pub mod error;
pub mod graph;
pub mod linalg;

pub use agents::{Agent, InProcessTransport, Message, RoundReport, Simulator, Transport};
pub use engine::{
    IterationMatrix, RunOptions, RunTrace, Snapshot, SpectralPrediction, Stepper, WeightedSystem,
};
pub use error::{Error, Result};
pub use graph::{DegreeVector, Digraph, LaplacianMatrix};
pub use linalg::{DenseMatrix, PowerIteration};
