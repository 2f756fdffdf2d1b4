//! Run configuration: a flat TOML document holding every trainer key plus a
//! few run-level keys.
//!
//! ```toml
//! scenario = "empty_goal_1v0"     # required
//! episode_length = 400            # optional, replaces the preset's length
//! checkpoint_interval = 10000     # env steps, 0 = final checkpoint only
//! eval_interval = 0               # env steps, 0 = no periodic eval
//! eval_episodes = 10
//! eval_seed = 0
//! gamma = 0.7                     # ...and any other trainer key
//! ```

use std::fs;
use std::path::Path;

use gqn_core::dqn::{ConfigError, Schedule, TrainerConfig};
use gqn_core::gnn::NetworkKind;
use gqn_core::pitch::Scenario;
use serde::{Deserialize, Serialize};

const RUN_KEYS: [&str; 6] = [
    "scenario",
    "episode_length",
    "checkpoint_interval",
    "eval_interval",
    "eval_episodes",
    "eval_seed",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunKeys {
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    episode_length: Option<u32>,
    checkpoint_interval: u64,
    eval_interval: u64,
    eval_episodes: usize,
    eval_seed: u64,
}

impl Default for RunKeys {
    fn default() -> Self {
        Self {
            scenario: None,
            episode_length: None,
            checkpoint_interval: 10_000,
            eval_interval: 0,
            eval_episodes: 10,
            eval_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    /// Replaces the preset's episode length when set.
    pub episode_length: Option<u32>,
    pub trainer: TrainerConfig,
    pub checkpoint_interval: u64,
    pub eval_interval: u64,
    pub eval_episodes: usize,
    pub eval_seed: u64,
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub net: Option<NetworkKind>,
    pub steps: Option<u64>,
    pub seed: Option<u64>,
}

fn parse_error(e: toml::de::Error) -> ConfigError {
    let msg = e.message().trim().to_string();
    // toml names the offending key in backticks
    let field = msg
        .split('`')
        .nth(1)
        .filter(|_| msg.contains("unknown field") || msg.contains("missing field"))
        .unwrap_or("config")
        .to_string();
    ConfigError::new(field, msg)
}

impl RunConfig {
    pub fn resolve(text: Option<&str>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut table: toml::Table = match text {
            Some(t) => t.parse().map_err(parse_error)?,
            None => toml::Table::new(),
        };
        let mut run_table = toml::Table::new();
        for key in RUN_KEYS {
            if let Some(v) = table.remove(key) {
                run_table.insert(key.to_string(), v);
            }
        }
        let run: RunKeys = run_table.try_into().map_err(parse_error)?;
        let mut trainer: TrainerConfig = table.try_into().map_err(parse_error)?;

        if let Some(net) = overrides.net {
            trainer.network_kind = net;
        }
        if let Some(steps) = overrides.steps {
            trainer.total_steps = steps;
        }
        if let Some(seed) = overrides.seed {
            trainer.seed = seed;
        }
        let scenario = overrides.scenario.clone().or(run.scenario).ok_or_else(|| {
            ConfigError::new(
                "scenario",
                "missing; pass --scenario or set `scenario` in the config",
            )
        })?;
        let config = RunConfig {
            scenario,
            episode_length: run.episode_length,
            trainer,
            checkpoint_interval: run.checkpoint_interval,
            eval_interval: run.eval_interval,
            eval_episodes: run.eval_episodes,
            eval_seed: run.eval_seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => Some(fs::read_to_string(p).map_err(|e| {
                ConfigError::new("config", format!("reading {}: {e}", p.display()))
            })?),
            None => None,
        };
        Self::resolve(text.as_deref(), overrides)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        Scenario::by_name(&self.scenario)
            .map_err(|e| ConfigError::new("scenario", e.to_string()))?;
        if self.episode_length == Some(0) {
            return Err(ConfigError::new("episode_length", "must be at least 1"));
        }
        if self.eval_episodes == 0 {
            return Err(ConfigError::new("eval_episodes", "must be at least 1"));
        }
        self.trainer.validate()
    }

    pub fn scenario(&self) -> Scenario {
        let s = Scenario::by_name(&self.scenario).expect("validated");
        match self.episode_length {
            Some(n) => s.with_episode_length(n),
            None => s,
        }
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            eval_interval: self.eval_interval,
            eval_episodes: self.eval_episodes,
            eval_seed: self.eval_seed,
            checkpoint_interval: self.checkpoint_interval,
        }
    }

    /// The fully resolved document; parses back to the same config.
    pub fn to_toml(&self) -> String {
        let run = RunKeys {
            scenario: Some(self.scenario.clone()),
            episode_length: self.episode_length,
            checkpoint_interval: self.checkpoint_interval,
            eval_interval: self.eval_interval,
            eval_episodes: self.eval_episodes,
            eval_seed: self.eval_seed,
        };
        let mut out = toml::to_string(&run).expect("run keys serialize");
        out.push_str(&self.trainer.to_toml());
        out
    }
}
