//! The environment interface the trainer drives, plus the two stock
//! implementations: the toy football pitch and a tiny chain MDP.

mod chain;
mod football;

use thiserror::Error;

use crate::gnn::Graph;
use crate::obs::ObsError;
use crate::pitch::PitchError;

pub use chain::{ChainEnv, CHAIN_LEFT, CHAIN_LENGTH, CHAIN_RIGHT};
pub use football::FootballEnv;

#[derive(Debug, Clone)]
pub struct EnvStep {
    pub graph: Graph<f64>,
    pub reward: f64,
    pub done: bool,
    /// Goals for minus goals against produced by this step.
    pub score_delta: i32,
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error(transparent)]
    Pitch(#[from] PitchError),
    #[error(transparent)]
    Observation(#[from] ObsError),
    #[error("step called after the episode ended")]
    EpisodeOver,
    #[error("action {0} out of range")]
    InvalidAction(usize),
    #[error("environment fault: {0}")]
    Fault(String),
}

/// Anything the trainer can act in. Observations arrive already encoded as
/// graphs.
pub trait Environment {
    fn reset(&mut self, seed: u64) -> Result<Graph<f64>, EnvError>;
    fn step(&mut self, action: usize) -> Result<EnvStep, EnvError>;
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn reset(&mut self, seed: u64) -> Result<Graph<f64>, EnvError> {
        (**self).reset(seed)
    }

    fn step(&mut self, action: usize) -> Result<EnvStep, EnvError> {
        (**self).step(action)
    }
}
