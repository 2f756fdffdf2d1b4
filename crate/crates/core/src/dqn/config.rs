use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gnn::NetworkKind;
use crate::numeric::AdamConfig;
use crate::obs::EdgeRule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    /// Discount factor.
    pub gamma: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    pub eps_decay_steps: u64,
    /// Env steps between hard target copies.
    pub sync_interval: u64,
    pub buffer_capacity: usize,
    /// Learning starts once the buffer holds this many transitions.
    pub min_buffer: usize,
    pub seed: u64,
    pub network_kind: NetworkKind,
    pub total_steps: u64,
    pub episodes_per_epoch: u64,
    pub edge_rule: EdgeRule,
    /// Optional global gradient-norm clip applied before each Adam step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_clip: Option<f64>,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            gamma: 0.7,
            lr: 1e-4,
            batch_size: 1,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_steps: 30_000,
            sync_interval: 1000,
            buffer_capacity: 100_000,
            min_buffer: 1000,
            seed: 0,
            network_kind: NetworkKind::Gcn,
            total_steps: 300_000,
            episodes_per_epoch: 3000,
            edge_rule: EdgeRule::Full,
            grad_clip: None,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::new(name, format!("{v} not in [0, 1]")))
            }
        };
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(ConfigError::new(
                "gamma",
                format!("{} not in [0, 1)", self.gamma),
            ));
        }
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(ConfigError::new(
                "lr",
                format!("{} is not a non-negative rate", self.lr),
            ));
        }
        prob("eps_start", self.eps_start)?;
        prob("eps_end", self.eps_end)?;
        if self.eps_end > self.eps_start {
            return Err(ConfigError::new("eps_end", "must not exceed eps_start"));
        }
        for (name, v) in [
            ("batch_size", self.batch_size as u64),
            ("eps_decay_steps", self.eps_decay_steps),
            ("sync_interval", self.sync_interval),
            ("buffer_capacity", self.buffer_capacity as u64),
            ("min_buffer", self.min_buffer as u64),
            ("episodes_per_epoch", self.episodes_per_epoch),
        ] {
            if v == 0 {
                return Err(ConfigError::new(name, "must be at least 1"));
            }
        }
        if self.min_buffer > self.buffer_capacity {
            return Err(ConfigError::new(
                "min_buffer",
                "must not exceed buffer_capacity",
            ));
        }
        if self.batch_size > self.buffer_capacity {
            return Err(ConfigError::new(
                "batch_size",
                "must not exceed buffer_capacity",
            ));
        }
        if let Some(c) = self.grad_clip {
            if !(c.is_finite() && c > 0.0) {
                return Err(ConfigError::new(
                    "grad_clip",
                    format!("{c} is not a positive norm"),
                ));
            }
        }
        Ok(())
    }

    /// Linear decay from `eps_start` to `eps_end` over `eps_decay_steps`,
    /// constant afterwards.
    pub fn epsilon_at(&self, step: u64) -> f64 {
        if step >= self.eps_decay_steps {
            return self.eps_end;
        }
        let frac = step as f64 / self.eps_decay_steps as f64;
        (self.eps_start + frac * (self.eps_end - self.eps_start)).max(self.eps_end)
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            ..AdamConfig::default()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new("config", e.message().trim()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_validate() {
        let c = TrainerConfig::default();
        c.validate().unwrap();
        assert_eq!(
            (c.gamma, c.lr, c.batch_size, c.episodes_per_epoch),
            (0.7, 1e-4, 1, 3000)
        );
    }

    #[test]
    fn rejects_bad_fields() {
        let bad = TrainerConfig {
            eps_end: 0.9,
            eps_start: 0.5,
            ..TrainerConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "eps_end");
        let bad = TrainerConfig {
            min_buffer: 10,
            buffer_capacity: 5,
            ..TrainerConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "min_buffer");
        let bad = TrainerConfig {
            gamma: 1.0,
            ..TrainerConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "gamma");
    }

    #[test]
    fn toml_round_trip() {
        let c = TrainerConfig {
            network_kind: NetworkKind::Gat,
            edge_rule: EdgeRule::Knn(4),
            grad_clip: Some(0.7),
            seed: 99,
            ..TrainerConfig::default()
        };
        assert_eq!(TrainerConfig::from_toml(&c.to_toml()).unwrap(), c);
        assert!(TrainerConfig::from_toml("gama = 0.5").is_err());
    }

    #[test]
    fn schedule_endpoints() {
        let c = TrainerConfig::default();
        assert_eq!(c.epsilon_at(0), 1.0);
        assert!((c.epsilon_at(15_000) - 0.525).abs() < 1e-12);
        assert_eq!(c.epsilon_at(30_000), 0.05);
        assert_eq!(c.epsilon_at(1_000_000), 0.05);
    }

    proptest! {
        #[test]
        fn schedule_is_monotone_and_bounded(a in 0u64..100_000, b in 0u64..100_000, start in 0.0f64..1.0, frac in 0.0f64..1.0) {
            let c = TrainerConfig { eps_start: start, eps_end: start * frac, ..TrainerConfig::default() };
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(c.epsilon_at(lo) >= c.epsilon_at(hi));
            let e = c.epsilon_at(a);
            prop_assert!(e >= c.eps_end && e <= c.eps_start + 1e-15);
        }
    }
}
