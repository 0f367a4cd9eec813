//! Round-based message-passing simulation of the consensus update.
//!
//! Every agent knows only its own weight, its state, and the ids of the
//! nodes it listens to. A round has two phases: all agents publish their
//! current state to their listeners, then every agent computes its new
//! state from its inbox and all agents commit together.

use std::collections::{BTreeMap, VecDeque};

use crate::engine::{Stepper, WeightedSystem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: usize,
    pub weight: f64,
    pub state: f64,
    /// Nodes this agent listens to, ascending.
    pub neighbors: Vec<usize>,
    /// Values received this round, keyed by sender.
    pub inbox: BTreeMap<usize, f64>,
}

/// Builds one agent per node of `sys`, starting from `x0`.
pub fn agents_from_system(sys: &WeightedSystem, x0: &[f64]) -> Result<Vec<Agent>> {
    let n = sys.node_count();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    Ok((0..n)
        .map(|i| Agent {
            id: i,
            weight: sys.weights()[i],
            state: x0[i],
            neighbors: sys.graph().neighbors(i).to_vec(),
            inbox: BTreeMap::new(),
        })
        .collect())
}

/// `x_i + (eps / w_i) * sum_{j in N_i} (x_j - x_i)`, summed in ascending `j`.
///
/// Reads only the agent itself; the caller commits the returned value.
pub fn local_update(agent: &Agent, epsilon: f64) -> Result<f64> {
    let gain = epsilon / agent.weight;
    let xi = agent.state;
    let mut acc = 0.0;
    for &j in &agent.neighbors {
        let xj = agent.inbox.get(&j).ok_or(Error::MissingMessage {
            agent: agent.id,
            neighbor: j,
        })?;
        acc += gain * (xj - xi);
    }
    Ok(xi + acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub from: usize,
    pub to: usize,
    pub value: f64,
}

/// Delivery seam between agents.
pub trait Transport {
    fn send(&mut self, message: Message);
    fn receive(&mut self) -> Option<Message>;
}

/// FIFO queue in the same process.
#[derive(Debug, Default)]
pub struct InProcessTransport {
    queue: VecDeque<Message>,
}

impl Transport for InProcessTransport {
    fn send(&mut self, message: Message) {
        self.queue.push_back(message);
    }

    fn receive(&mut self) -> Option<Message> {
        self.queue.pop_front()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: usize,
    pub states: Vec<f64>,
    pub messages_sent: usize,
}

#[derive(Debug, Clone, Copy)]
struct Fault {
    node: usize,
    round: usize,
    delta: f64,
}

#[derive(Debug)]
pub struct Simulator<T: Transport = InProcessTransport> {
    agents: Vec<Agent>,
    /// listeners[j] = agents that listen to j.
    listeners: Vec<Vec<usize>>,
    epsilon: f64,
    transport: T,
    round: usize,
    states: Vec<f64>,
    fault: Option<Fault>,
}

impl Simulator<InProcessTransport> {
    pub fn new(sys: &WeightedSystem, x0: &[f64], epsilon: f64) -> Result<Self> {
        Self::from_agents(agents_from_system(sys, x0)?, epsilon)
    }

    pub fn from_agents(agents: Vec<Agent>, epsilon: f64) -> Result<Self> {
        Self::with_transport(agents, epsilon, InProcessTransport::default())
    }
}

impl<T: Transport> Simulator<T> {
    pub fn with_transport(agents: Vec<Agent>, epsilon: f64, transport: T) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        let n = agents.len();
        let mut listeners = vec![Vec::new(); n];
        for (i, agent) in agents.iter().enumerate() {
            if agent.id != i {
                return Err(Error::InvalidOption(format!(
                    "agent at position {i} has id {}",
                    agent.id
                )));
            }
            if !agent.neighbors.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidOption(format!(
                    "neighbors of agent {i} are not strictly ascending"
                )));
            }
            for &j in &agent.neighbors {
                if j >= n || j == i {
                    return Err(Error::InvalidOption(format!(
                        "agent {i} lists invalid neighbor {j}"
                    )));
                }
                listeners[j].push(i);
            }
        }
        let states = agents.iter().map(|a| a.state).collect();
        Ok(Self {
            agents,
            listeners,
            epsilon,
            transport,
            round: 0,
            states,
            fault: None,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn rounds_completed(&self) -> usize {
        self.round
    }

    /// Test hook: adds `delta` to `node`'s committed state in round `round`.
    #[doc(hidden)]
    pub fn inject_fault(&mut self, node: usize, round: usize, delta: f64) {
        self.fault = Some(Fault { node, round, delta });
    }

    /// Runs one synchronous round.
    pub fn round(&mut self) -> Result<RoundReport> {
        let mut messages_sent = 0;
        for (j, agent) in self.agents.iter().enumerate() {
            for &i in &self.listeners[j] {
                self.transport.send(Message {
                    from: j,
                    to: i,
                    value: agent.state,
                });
                messages_sent += 1;
            }
        }
        while let Some(msg) = self.transport.receive() {
            self.agents[msg.to].inbox.insert(msg.from, msg.value);
        }

        let mut next = self
            .agents
            .iter()
            .map(|a| local_update(a, self.epsilon))
            .collect::<Result<Vec<_>>>()?;

        self.round += 1;
        if let Some(f) = self.fault.filter(|f| f.round == self.round) {
            next[f.node] += f.delta;
        }
        for (agent, &x) in self.agents.iter_mut().zip(&next) {
            agent.state = x;
            agent.inbox.clear();
        }
        self.states = next;
        Ok(RoundReport {
            round: self.round,
            states: self.states.clone(),
            messages_sent,
        })
    }
}

impl<T: Transport> Stepper for Simulator<T> {
    fn state(&self) -> &[f64] {
        &self.states
    }

    fn advance(&mut self) -> Result<()> {
        self.round().map(|_| ())
    }
}

/// Runs `rounds` rounds; the first report holds the initial states.
pub fn run_rounds(agents: Vec<Agent>, epsilon: f64, rounds: usize) -> Result<Vec<RoundReport>> {
    let mut sim = Simulator::from_agents(agents, epsilon)?;
    let mut reports = Vec::with_capacity(rounds + 1);
    reports.push(RoundReport {
        round: 0,
        states: sim.states().to_vec(),
        messages_sent: 0,
    });
    for _ in 0..rounds {
        reports.push(sim.round()?);
    }
    Ok(reports)
}
