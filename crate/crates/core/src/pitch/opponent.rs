use super::physics::{GOAL_HALF_WIDTH, SHOOTING_RANGE, SPEED, SPRINT_SPEED};
use super::state::{distance, toward, PitchState, Team};

/// What one right-team player wants to do this tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpponentIntent {
    pub velocity: [f64; 2],
    /// Shot target on the left goal line, if shooting.
    pub shot_target: Option<[f64; 2]>,
}

impl OpponentIntent {
    const STILL: OpponentIntent = OpponentIntent {
        velocity: [0.0, 0.0],
        shot_target: None,
    };
}

/// Rule-based right-team behaviour, one intent per right player in index
/// order.
///
/// The active player nearest the ball chases it unless the right team already
/// has it; the right ball owner runs at the left goal and shoots once within
/// range; everyone else drifts back to formation. Speeds scale linearly with
/// `difficulty`, so difficulty 0 freezes the team.
pub fn scripted_opponent_policy(state: &PitchState, difficulty: f64) -> Vec<OpponentIntent> {
    let team = Team::Right.players();
    let mut intents = vec![OpponentIntent::STILL; team.len()];
    if difficulty <= 0.0 {
        return intents;
    }
    let chase_speed = SPRINT_SPEED * difficulty;
    let jog_speed = SPEED * difficulty;
    let ball = [state.ball.pos[0], state.ball.pos[1]];
    let goal = [Team::Right.attacking_goal_x(), 0.0];
    let owner = state.ball.owner;

    let chaser = if state.ball_owner_team() == Some(Team::Right) {
        None
    } else {
        team.clone()
            .filter(|&i| state.players[i].active)
            .min_by(|&a, &b| {
                distance(state.players[a].pos, ball)
                    .total_cmp(&distance(state.players[b].pos, ball))
                    .then(a.cmp(&b))
            })
    };

    for (slot, i) in team.enumerate() {
        let p = &state.players[i];
        if !p.active {
            continue;
        }
        intents[slot] = if owner == Some(i) {
            if distance(p.pos, goal) <= SHOOTING_RANGE {
                // aim at the post away from the keeper
                let keeper_y = state.players[0].pos[1];
                let y = if keeper_y > 0.0 {
                    -0.7 * GOAL_HALF_WIDTH
                } else {
                    0.7 * GOAL_HALF_WIDTH
                };
                OpponentIntent {
                    velocity: [0.0, 0.0],
                    shot_target: Some([goal[0], y]),
                }
            } else {
                OpponentIntent {
                    velocity: toward(p.pos, goal, jog_speed.max(chase_speed * 0.8)),
                    shot_target: None,
                }
            }
        } else if chaser == Some(i) {
            OpponentIntent {
                velocity: toward(p.pos, ball, chase_speed),
                shot_target: None,
            }
        } else {
            OpponentIntent {
                velocity: toward(p.pos, p.home, jog_speed),
                shot_target: None,
            }
        };
    }
    intents
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pitch::{Pitch, Scenario};

    fn match_state(seed: u64) -> PitchState {
        let mut pitch = Pitch::new(Scenario::by_name("hard").unwrap());
        pitch.reset(seed);
        pitch.state().clone()
    }

    #[test]
    fn zero_difficulty_is_stationary() {
        let state = match_state(1);
        let intents = scripted_opponent_policy(&state, 0.0);
        assert_eq!(intents.len(), 11);
        assert!(intents
            .iter()
            .all(|i| i.velocity == [0.0, 0.0] && i.shot_target.is_none()));
    }

    #[test]
    fn owner_in_range_shoots() {
        let mut state = match_state(2);
        let shooter = 11 + 9;
        state.players[shooter].pos = [-0.8, 0.05];
        state.ball.pos = [-0.8, 0.05, 0.0];
        state.ball.owner = Some(shooter);
        let intents = scripted_opponent_policy(&state, 1.0);
        let target = intents[9].shot_target.expect("shot intent");
        assert_eq!(target[0], -1.0);
        assert!(target[1].abs() <= GOAL_HALF_WIDTH);
    }

    #[test]
    fn owner_out_of_range_advances() {
        let mut state = match_state(3);
        let carrier = 11 + 5;
        state.players[carrier].pos = [0.2, 0.0];
        state.ball.owner = Some(carrier);
        let intents = scripted_opponent_policy(&state, 0.5);
        assert!(intents[5].shot_target.is_none());
        assert!(intents[5].velocity[0] < 0.0);
    }

    #[test]
    fn deterministic() {
        let state = match_state(4);
        assert_eq!(
            scripted_opponent_policy(&state, 0.6),
            scripted_opponent_policy(&state, 0.6)
        );
    }

    #[test]
    fn nearest_chases_loose_ball() {
        let mut state = match_state(5);
        state.ball.owner = None;
        state.ball.pos = [0.5, 0.2, 0.0];
        let intents = scripted_opponent_policy(&state, 1.0);
        let ball = [0.5, 0.2];
        let nearest = (11..22)
            .min_by(|&a, &b| {
                distance(state.players[a].pos, ball)
                    .total_cmp(&distance(state.players[b].pos, ball))
            })
            .unwrap();
        let v = intents[nearest - 11].velocity;
        assert!((v[0].hypot(v[1]) - SPRINT_SPEED).abs() < 1e-12);
    }
}
