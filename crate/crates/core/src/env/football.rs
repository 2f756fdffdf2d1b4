use crate::gnn::Graph;
use crate::obs::{EdgeRule, GraphBuilder};
use crate::pitch::{Pitch, Scenario};

use super::{EnvError, EnvStep, Environment};

/// The toy pitch with observations encoded by a [`GraphBuilder`].
#[derive(Debug, Clone)]
pub struct FootballEnv {
    pitch: Pitch,
    builder: GraphBuilder,
}

impl FootballEnv {
    pub fn new(scenario: Scenario, rule: EdgeRule) -> Self {
        Self {
            pitch: Pitch::new(scenario),
            builder: GraphBuilder::new(rule),
        }
    }

    pub fn pitch(&self) -> &Pitch {
        &self.pitch
    }
}

impl Environment for FootballEnv {
    fn reset(&mut self, seed: u64) -> Result<Graph<f64>, EnvError> {
        let obs = self.pitch.reset(seed);
        Ok(self.builder.build(&obs)?)
    }

    fn step(&mut self, action: usize) -> Result<EnvStep, EnvError> {
        let before = self.pitch.state().score;
        let out = self.pitch.step(action)?;
        let (l, r) = out.info.score;
        let score_delta = (l as i32 - before.0 as i32) - (r as i32 - before.1 as i32);
        Ok(EnvStep {
            graph: self.builder.build(&out.obs)?,
            reward: out.reward,
            done: out.done,
            score_delta,
        })
    }
}
