use crate::numeric::RngStream;
use crate::obs::{
    GameMode, Observation, PlayerObs, PITCH_HALF_LENGTH, PITCH_HALF_WIDTH, PLAYERS_PER_TEAM,
};

use super::Scenario;

pub const CHECKPOINT_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Team {
    Left,
    Right,
}

impl Team {
    pub fn of(player: usize) -> Team {
        if player < PLAYERS_PER_TEAM {
            Team::Left
        } else {
            Team::Right
        }
    }

    pub fn opponent(self) -> Team {
        match self {
            Team::Left => Team::Right,
            Team::Right => Team::Left,
        }
    }

    /// Global player indices of this team.
    pub fn players(self) -> std::ops::Range<usize> {
        match self {
            Team::Left => 0..PLAYERS_PER_TEAM,
            Team::Right => PLAYERS_PER_TEAM..2 * PLAYERS_PER_TEAM,
        }
    }

    /// x of the goal this team attacks.
    pub fn attacking_goal_x(self) -> f64 {
        match self {
            Team::Left => PITCH_HALF_LENGTH,
            Team::Right => -PITCH_HALF_LENGTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    pub tired: f64,
    pub home: [f64; 2],
    /// Parked players never move or touch the ball.
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub pos: [f64; 3],
    pub vel: [f64; 3],
    /// Global index of the player in possession.
    pub owner: Option<usize>,
    pub last_touch: Option<Team>,
    /// Player that just kicked the ball and may not retake it yet.
    pub kicker: Option<usize>,
    pub cooldown: u32,
}

/// Modifiers held by the controlled player between ticks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Control {
    pub direction: Option<[f64; 2]>,
    pub sprint: bool,
    pub dribble: bool,
}

/// Full simulator state. Player indices are global: 0–10 left, 11–21 right.
#[derive(Debug, Clone)]
pub struct PitchState {
    pub scenario: Scenario,
    pub players: Vec<Player>,
    pub ball: Ball,
    pub score: (u32, u32),
    pub step: u32,
    pub rng: RngStream,
    /// Reward regions already paid this episode.
    pub checkpoints: [bool; CHECKPOINT_COUNT],
    /// Index into the left team of the controlled player.
    pub controlled: usize,
    pub control: Control,
    pub game_mode: GameMode,
    pub done: bool,
}

impl PitchState {
    pub fn ball_owner_team(&self) -> Option<Team> {
        self.ball.owner.map(Team::of)
    }

    pub fn left_has_ball(&self) -> bool {
        self.ball_owner_team() == Some(Team::Left)
    }

    pub fn observation(&self) -> Observation {
        let team = |t: Team| {
            t.players()
                .map(|i| {
                    let p = &self.players[i];
                    PlayerObs {
                        pos: p.pos,
                        dir: p.vel,
                        tired: p.tired,
                    }
                })
                .collect()
        };
        Observation {
            ball_pos: self.ball.pos,
            ball_dir: self.ball.vel,
            left_team: team(Team::Left),
            right_team: team(Team::Right),
            active: self.controlled,
            score: self.score,
            steps_left: self.scenario.episode_length.saturating_sub(self.step),
            game_mode: self.game_mode,
        }
    }
}

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Vector from `from` toward `to` with length at most `speed`.
pub fn toward(from: [f64; 2], to: [f64; 2], speed: f64) -> [f64; 2] {
    let d = distance(from, to);
    if d <= 1e-12 || speed <= 0.0 {
        return [0.0, 0.0];
    }
    let s = speed.min(d) / d;
    [(to[0] - from[0]) * s, (to[1] - from[1]) * s]
}

pub fn clamp_to_pitch(p: [f64; 2]) -> [f64; 2] {
    [
        p[0].clamp(-PITCH_HALF_LENGTH, PITCH_HALF_LENGTH),
        p[1].clamp(-PITCH_HALF_WIDTH, PITCH_HALF_WIDTH),
    ]
}
