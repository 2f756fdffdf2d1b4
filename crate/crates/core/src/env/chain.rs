use std::sync::Arc;

use crate::gnn::{Adjacency, Graph, FEATURE_WIDTH, NUM_ACTIONS};
use crate::numeric::Matrix;

use super::{EnvError, EnvStep, Environment};

pub const CHAIN_LENGTH: usize = 5;
/// Action index that moves one state toward the goal end.
pub const CHAIN_RIGHT: usize = 5;
pub const CHAIN_LEFT: usize = 1;

/// A deterministic corridor of [`CHAIN_LENGTH`] states. The agent starts at
/// state 0; reaching the last state pays 1 and ends the episode. Every other
/// transition pays 0. `CHAIN_RIGHT` and `CHAIN_LEFT` move, all other actions
/// stay put, and moving left at state 0 is a no-op.
///
/// The graph is a path over the states: slot 0 holds the node's position,
/// slot 4 flags the agent's node and slot 8 carries the agent position on
/// every node.
#[derive(Debug, Clone)]
pub struct ChainEnv {
    adjacency: Arc<Adjacency>,
    position: usize,
    steps: usize,
    max_steps: usize,
    done: bool,
}

impl ChainEnv {
    pub fn new(max_steps: usize) -> Self {
        Self {
            adjacency: Arc::new(Adjacency::path(CHAIN_LENGTH)),
            position: 0,
            steps: 0,
            max_steps: max_steps.max(1),
            done: true,
        }
    }

    pub fn position(&self) -> usize {
        self.position
    }

    /// Graph for the agent standing at `position`.
    pub fn graph_at(&self, position: usize) -> Graph<f64> {
        let scale = (CHAIN_LENGTH - 1) as f64;
        let mut features = Matrix::zeros(CHAIN_LENGTH, FEATURE_WIDTH);
        for i in 0..CHAIN_LENGTH {
            let row = features.row_mut(i);
            row[0] = i as f64 / scale;
            row[4] = if i == position { 1.0 } else { 0.0 };
            row[8] = position as f64 / scale;
        }
        Graph::new(features, Arc::clone(&self.adjacency)).expect("chain graph shape")
    }

    /// Deterministic transition: (next position, reward, terminal).
    pub fn transition(position: usize, action: usize) -> (usize, f64, bool) {
        let next = match action {
            CHAIN_RIGHT => (position + 1).min(CHAIN_LENGTH - 1),
            CHAIN_LEFT => position.saturating_sub(1),
            _ => position,
        };
        if next == CHAIN_LENGTH - 1 {
            (next, 1.0, true)
        } else {
            (next, 0.0, false)
        }
    }
}

impl Default for ChainEnv {
    fn default() -> Self {
        Self::new(100)
    }
}

impl Environment for ChainEnv {
    fn reset(&mut self, _seed: u64) -> Result<Graph<f64>, EnvError> {
        self.position = 0;
        self.steps = 0;
        self.done = false;
        Ok(self.graph_at(0))
    }

    fn step(&mut self, action: usize) -> Result<EnvStep, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeOver);
        }
        if action >= NUM_ACTIONS {
            return Err(EnvError::InvalidAction(action));
        }
        let (next, reward, terminal) = Self::transition(self.position, action);
        self.position = next;
        self.steps += 1;
        self.done = terminal || self.steps >= self.max_steps;
        Ok(EnvStep {
            graph: self.graph_at(next),
            reward,
            done: self.done,
            score_delta: 0,
        })
    }
}
