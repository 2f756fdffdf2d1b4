//! A small deterministic football simulator.
//!
//! First-order kinematics on the standard pitch frame: x in [-1, 1] toward
//! the right goal, y in [-0.42, 0.42]. The agent controls one left player at
//! a time; the right team follows [`scripted_opponent_policy`].

mod action;
mod opponent;
mod physics;
mod recorder;
mod reward;
mod scenario;
mod sim;
mod state;

use thiserror::Error;

pub use action::Action;
pub use opponent::{scripted_opponent_policy, OpponentIntent};
pub use physics::{GOAL_HALF_WIDTH, SHOOTING_RANGE, SHOT_SPEED, SPEED, SPRINT_SPEED};
pub use recorder::{record_episode, EpisodeSummary, RecordError};
pub use reward::{band_threshold, checkpoint_reward, CHECKPOINT_BONUS};
pub use scenario::{Scenario, ScenarioKind, SCENARIO_NAMES};
pub use sim::{Pitch, StepInfo, StepOutcome};
pub use state::{Ball, Control, PitchState, Player, Team, CHECKPOINT_COUNT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PitchError {
    #[error("unknown scenario `{name}` (available: {available})")]
    UnknownScenario { name: String, available: String },
    #[error("difficulty {0} outside [0, 1]")]
    Difficulty(f64),
    #[error("step called after the episode ended; call reset first")]
    EpisodeOver,
    #[error("action {0} not in 0..=18")]
    InvalidAction(usize),
}
