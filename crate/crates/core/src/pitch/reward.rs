use super::state::{PitchState, CHECKPOINT_COUNT};

pub const CHECKPOINT_BONUS: f64 = 0.1;

/// Lower ball-x edge of checkpoint band `k`: 0.1, 0.2, …, 1.0 on the way to
/// the right goal.
pub fn band_threshold(k: usize) -> f64 {
    (k + 1) as f64 / CHECKPOINT_COUNT as f64
}

/// Pays +0.1 for every band the left team has newly carried the ball into.
///
/// A band counts when the left team owns the ball in `next` at or beyond the
/// band's threshold and its flag was unset in `prev`. Flags in `next` are
/// updated; they are never cleared within an episode.
pub fn checkpoint_reward(prev: &PitchState, next: &mut PitchState) -> f64 {
    let mut flags = prev.checkpoints;
    for k in 0..CHECKPOINT_COUNT {
        flags[k] |= next.checkpoints[k];
    }
    let mut reward = 0.0;
    if next.left_has_ball() {
        let x = next.ball.pos[0];
        for (k, flag) in flags.iter_mut().enumerate() {
            if !*flag && x >= band_threshold(k) {
                *flag = true;
                reward += CHECKPOINT_BONUS;
            }
        }
    }
    next.checkpoints = flags;
    reward
}

/// Marks bands already behind the ball at kickoff so they are not paid for
/// free on the first tick.
pub fn mark_reached_bands(state: &mut PitchState) {
    if state.left_has_ball() {
        let x = state.ball.pos[0];
        for (k, flag) in state.checkpoints.iter_mut().enumerate() {
            if x >= band_threshold(k) {
                *flag = true;
            }
        }
    }
}
