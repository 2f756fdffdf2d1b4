//! Football observations, their graph encoding, and the dump format.

mod dump;
mod features;
mod observation;

use thiserror::Error;

pub use dump::{
    parse_dump_line, parse_obs_dump, to_dump_line, DumpError, DumpReader, DumpRecord, DumpWriter,
};
pub use features::{
    obs_to_graph, EdgeRule, GraphBuilder, BALL_NODE, GLOBAL_NODE, NODE_COUNT, SLOT_ACTIVE,
    SLOT_EXTRA, SLOT_IS_BALL, SLOT_LEFT_TEAM, SLOT_RIGHT_TEAM,
};
pub use observation::{
    validate_obs, GameMode, Observation, PlayerObs, Violation, PITCH_HALF_LENGTH, PITCH_HALF_WIDTH,
    PLAYERS_PER_TEAM,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObsError {
    #[error("invalid observation: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}
