use std::io::{self, Write};

use thiserror::Error;

use crate::obs::{DumpRecord, DumpWriter, Observation};

use super::{Pitch, PitchError};

#[derive(Debug, Error)]
pub enum RecordError {
    #[error(transparent)]
    Pitch(#[from] PitchError),
    #[error("writing dump: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSummary {
    pub steps: usize,
    pub total_reward: f64,
    pub score: (u32, u32),
}

/// Plays one episode from `reset(seed)` and writes one dump record per step:
/// the observation the action was chosen in, the action, and its outcome.
pub fn record_episode<W, P>(
    pitch: &mut Pitch,
    seed: u64,
    mut policy: P,
    out: &mut DumpWriter<W>,
) -> Result<EpisodeSummary, RecordError>
where
    W: Write,
    P: FnMut(&Observation) -> usize,
{
    let mut obs = pitch.reset(seed);
    let mut summary = EpisodeSummary {
        steps: 0,
        total_reward: 0.0,
        score: (0, 0),
    };
    loop {
        let action = policy(&obs);
        let outcome = pitch.step(action)?;
        out.write(&DumpRecord {
            obs,
            action,
            reward: outcome.reward,
            done: outcome.done,
        })?;
        summary.steps += 1;
        summary.total_reward += outcome.reward;
        summary.score = outcome.info.score;
        obs = outcome.obs;
        if outcome.done {
            break;
        }
    }
    out.flush()?;
    Ok(summary)
}
