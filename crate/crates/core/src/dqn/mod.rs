//! Deep Q-learning over graph observations: replay memory, epsilon-greedy
//! acting, TD learning with a periodically synced target network,
//! evaluation and checkpoints.

mod checkpoint;
mod config;
mod evaluate;
mod metrics;
mod policy;
mod replay;
mod td;
mod trainer;

pub use checkpoint::{
    checkpoint_from_str, checkpoint_to_string, load_checkpoint, save_checkpoint, CheckpointError,
    CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use config::{ConfigError, TrainerConfig};
pub use evaluate::{
    eval_episode_seed, evaluate, evaluate_policy, evaluate_random, EvalError, EvalResult,
};
pub use metrics::{MetricsRow, MetricsWriter, METRICS_HEADER};
pub use policy::{greedy_action, select_action};
pub use replay::{ReplayBuffer, ReplayError, Transition};
pub use td::{learn_on_batch, td_loss, td_target, LearnError};
pub use trainer::{
    train, train_episode_seed, CheckpointReason, RowCollector, Schedule, TrainError, TrainObserver,
    TrainSummary, TrainerState,
};
