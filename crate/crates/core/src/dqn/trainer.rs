use std::sync::Arc;

use rand::RngCore;

use crate::env::{EnvError, Environment};
use crate::gnn::{GnnError, QNetwork};
use crate::numeric::{AdamState, RngStream};

use super::config::{ConfigError, TrainerConfig};
use super::evaluate::{evaluate, EvalError, EvalResult};
use super::metrics::MetricsRow;
use super::policy::select_action;
use super::replay::{ReplayBuffer, ReplayError, Transition};
use super::td::{learn_on_batch, LearnError};

/// Everything a run needs to continue exactly where it stopped.
#[derive(Debug, Clone)]
pub struct TrainerState {
    pub config: TrainerConfig,
    pub local: QNetwork<f64>,
    pub target: QNetwork<f64>,
    pub optimizer: AdamState<f64>,
    pub buffer: ReplayBuffer,
    pub env_steps: u64,
    pub episodes: u64,
    pub learn_steps: u64,
    pub epsilon: f64,
    pub action_rng: RngStream,
    pub replay_rng: RngStream,
}

impl TrainerState {
    pub fn new(config: TrainerConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let root = RngStream::from_seed(config.seed);
        let local = QNetwork::new(config.network_kind, &mut root.split("init"));
        let target = local.clone();
        let optimizer = AdamState::for_params(local.params());
        Ok(Self {
            buffer: ReplayBuffer::new(config.buffer_capacity),
            epsilon: config.epsilon_at(0),
            action_rng: root.split("action"),
            replay_rng: root.split("replay"),
            config,
            local,
            target,
            optimizer,
            env_steps: 0,
            episodes: 0,
            learn_steps: 0,
        })
    }

    /// Hard copy θ⁻ ← θ.
    pub fn sync_target(&mut self) {
        self.target.copy_params_from(&self.local);
    }

    /// Samples a batch and takes one optimizer step. `None` while the buffer
    /// holds fewer than `min_buffer` transitions.
    pub fn learn_step(&mut self) -> Result<Option<f64>, TrainError> {
        let need = self.config.min_buffer.max(self.config.batch_size);
        if self.buffer.len() < need {
            return Ok(None);
        }
        let batch = self
            .buffer
            .sample(self.config.batch_size, &mut self.replay_rng)?;
        let loss = learn_on_batch(
            &mut self.local,
            &self.target,
            &mut self.optimizer,
            &self.config.adam(),
            &batch,
            self.config.gamma,
            self.config.grad_clip,
        )?;
        self.learn_steps += 1;
        Ok(Some(loss))
    }
}

/// Reset seed of training episode `index`.
pub fn train_episode_seed(seed: u64, index: u64) -> u64 {
    RngStream::from_seed(seed)
        .split("episode")
        .split_index(index)
        .next_u64()
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("environment: {0}")]
    Env(#[from] EnvError),
    #[error(transparent)]
    Network(#[from] GnnError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("observer: {0}")]
    Observer(String),
}

impl From<EvalError> for TrainError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Env(e) => TrainError::Env(e),
            EvalError::Network(e) => TrainError::Network(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckpointReason {
    Periodic,
    /// Written just before an environment fault is returned.
    Abort,
}

/// Receives metrics rows and checkpoint opportunities from [`train`].
pub trait TrainObserver {
    fn on_row(&mut self, row: &MetricsRow) -> Result<(), String>;

    fn on_checkpoint(
        &mut self,
        _state: &TrainerState,
        _reason: CheckpointReason,
    ) -> Result<(), String> {
        Ok(())
    }
}

/// Collects rows in memory.
#[derive(Debug, Default)]
pub struct RowCollector {
    pub rows: Vec<MetricsRow>,
}

impl TrainObserver for RowCollector {
    fn on_row(&mut self, row: &MetricsRow) -> Result<(), String> {
        self.rows.push(row.clone());
        Ok(())
    }
}

/// Cadences that live outside the checkpointed config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    /// Env steps between evaluations; 0 disables them.
    pub eval_interval: u64,
    pub eval_episodes: usize,
    pub eval_seed: u64,
    /// Env steps between periodic checkpoints; 0 disables them.
    pub checkpoint_interval: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            eval_interval: 0,
            eval_episodes: 10,
            eval_seed: 0,
            checkpoint_interval: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSummary {
    pub episodes_finished: u64,
    /// Mean return of the last (up to) 100 finished episodes of this call.
    pub recent_mean_return: Option<f64>,
    pub last_eval: Option<EvalResult>,
}

fn crossed(before: u64, after: u64, interval: u64) -> bool {
    interval > 0 && after / interval > before / interval
}

/// Runs the DQN loop until `state.env_steps` reaches `config.total_steps`.
///
/// Episodes always start fresh, so an episode still running when the step
/// budget runs out is cut short and produces no row. Evaluations and
/// periodic checkpoints happen at episode ends, whenever the episode crossed
/// a multiple of their interval; a checkpoint taken there resumes exactly.
pub fn train<E, O>(
    state: &mut TrainerState,
    env: &mut E,
    schedule: &Schedule,
    observer: &mut O,
) -> Result<TrainSummary, TrainError>
where
    E: Environment + ?Sized,
    O: TrainObserver + ?Sized,
{
    let cfg = state.config.clone();
    cfg.validate()?;
    let mut returns: Vec<f64> = Vec::new();
    let mut finished = 0;
    let mut last_eval = None;

    let abort = |state: &TrainerState, observer: &mut O, e: EnvError| -> TrainError {
        // the env error wins over a failing abort checkpoint
        let _ = observer.on_checkpoint(state, CheckpointReason::Abort);
        TrainError::Env(e)
    };

    while state.env_steps < cfg.total_steps {
        let start = state.env_steps;
        let seed = train_episode_seed(cfg.seed, state.episodes);
        let mut graph = match env.reset(seed) {
            Ok(g) => Arc::new(g),
            Err(e) => return Err(abort(state, observer, e)),
        };
        let mut ret = 0.0;
        let mut score = 0i64;
        let mut loss_sum = 0.0;
        let mut loss_n = 0u64;
        let mut done = false;

        while state.env_steps < cfg.total_steps {
            state.epsilon = cfg.epsilon_at(state.env_steps);
            let q = state.local.forward(&graph)?;
            let action = select_action(&q, state.epsilon, &mut state.action_rng);
            let step = match env.step(action) {
                Ok(s) => s,
                Err(e) => return Err(abort(state, observer, e)),
            };
            let next = Arc::new(step.graph);
            let t = Transition::new(
                Arc::clone(&graph),
                action,
                step.reward,
                Arc::clone(&next),
                step.done,
            )
            .map_err(|e| abort(state, observer, EnvError::Fault(e.to_string())))?;
            state.buffer.push(t);
            state.env_steps += 1;
            ret += step.reward;
            score += i64::from(step.score_delta);

            if let Some(loss) = state.learn_step()? {
                loss_sum += loss;
                loss_n += 1;
            }
            if state.env_steps.is_multiple_of(cfg.sync_interval) {
                state.sync_target();
            }
            graph = next;
            if step.done {
                done = true;
                break;
            }
        }
        state.epsilon = cfg.epsilon_at(state.env_steps);
        if !done {
            break;
        }

        state.episodes += 1;
        finished += 1;
        returns.push(ret);
        observer
            .on_row(&MetricsRow {
                step: state.env_steps,
                episode: state.episodes,
                epsilon: state.epsilon,
                loss: (loss_n > 0).then(|| loss_sum / loss_n as f64),
                episode_return: Some(ret),
                score_diff: Some(score as f64),
                eval_return: None,
            })
            .map_err(TrainError::Observer)?;

        if crossed(start, state.env_steps, schedule.eval_interval) {
            let r = evaluate(
                env,
                &state.local,
                schedule.eval_episodes.max(1),
                schedule.eval_seed,
            )?;
            last_eval = Some(r);
            observer
                .on_row(&MetricsRow {
                    step: state.env_steps,
                    episode: state.episodes,
                    epsilon: state.epsilon,
                    loss: None,
                    episode_return: None,
                    score_diff: Some(r.mean_score_diff),
                    eval_return: Some(r.mean_return),
                })
                .map_err(TrainError::Observer)?;
        }
        if crossed(start, state.env_steps, schedule.checkpoint_interval) {
            observer
                .on_checkpoint(state, CheckpointReason::Periodic)
                .map_err(TrainError::Observer)?;
        }
    }

    let tail = &returns[returns.len().saturating_sub(100)..];
    Ok(TrainSummary {
        episodes_finished: finished,
        recent_mean_return: (!tail.is_empty())
            .then(|| tail.iter().sum::<f64>() / tail.len() as f64),
        last_eval,
    })
}
