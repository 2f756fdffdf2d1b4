use crate::obs::{PITCH_HALF_LENGTH, PITCH_HALF_WIDTH};

use super::state::{distance, Ball, Team};

pub const SPEED: f64 = 0.01;
pub const SPRINT_SPEED: f64 = 0.015;
/// Speed multiplier while the dribble modifier is held.
pub const DRIBBLE_FACTOR: f64 = 0.8;

pub const BALL_FRICTION: f64 = 0.92;
pub const GRAVITY: f64 = 0.004;
/// Ball above this height cannot be controlled.
pub const CONTROL_HEIGHT: f64 = 0.03;

pub const CONTROL_RADIUS: f64 = 0.02;
pub const TACKLE_RADIUS: f64 = 0.02;
pub const SLIDE_RADIUS: f64 = 0.04;
pub const SLIDE_SUCCESS: f64 = 0.6;
/// Per-tick chance that a right player in reach steals, scaled by difficulty.
pub const RIGHT_STEAL: f64 = 0.3;
pub const LEFT_STEAL: f64 = 0.15;

pub const GOAL_HALF_WIDTH: f64 = 0.044;
pub const SHOT_SPEED: f64 = 0.045;
/// Roughly how far a shot rolls.
pub const SHOOTING_RANGE: f64 = 0.45;
pub const HIGH_PASS_LIFT: f64 = 0.02;
pub const KICK_COOLDOWN: u32 = 4;

pub const SHORT_PASS_DEFAULT: f64 = 0.2;
pub const LONG_PASS_DEFAULT: f64 = 0.5;

pub const TIRE_RATE: f64 = 0.001;
pub const RECOVER_RATE: f64 = 0.0005;

/// Initial ground speed that makes a rolling ball stop after `dist`.
pub fn rolling_speed(dist: f64) -> f64 {
    dist * (1.0 - BALL_FRICTION) + 0.002
}

/// Puts the ball in motion from its current position toward `target`.
pub fn kick(ball: &mut Ball, kicker: usize, target: [f64; 2], speed: f64, lift: f64) {
    let from = [ball.pos[0], ball.pos[1]];
    let d = distance(from, target);
    let (ux, uy) = if d > 1e-12 {
        ((target[0] - from[0]) / d, (target[1] - from[1]) / d)
    } else {
        (
            if Team::of(kicker) == Team::Left {
                1.0
            } else {
                -1.0
            },
            0.0,
        )
    };
    ball.vel = [ux * speed, uy * speed, lift];
    ball.owner = None;
    ball.kicker = Some(kicker);
    ball.cooldown = KICK_COOLDOWN;
    ball.last_touch = Some(Team::of(kicker));
}

/// Where a free ball left the field during one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BallExit {
    /// Crossed a goal line between the posts; the team is the scorer.
    Goal(Team),
    /// Crossed the goal line wide; `at` is the crossing point.
    GoalLine {
        side: Team,
        at: [f64; 2],
    },
    Touchline {
        at: [f64; 2],
    },
}

/// Advances a free ball by one tick and reports whether it left play.
/// The returned ball position is always inside the pitch.
pub fn integrate_free_ball(ball: &mut Ball) -> Option<BallExit> {
    let x0 = ball.pos[0];
    let y0 = ball.pos[1];
    let mut x1 = x0 + ball.vel[0];
    let mut y1 = y0 + ball.vel[1];
    let mut z = ball.pos[2] + ball.vel[2];
    ball.vel[2] -= GRAVITY;
    if z <= 0.0 {
        z = 0.0;
        ball.vel[2] = 0.0;
    }
    ball.vel[0] *= BALL_FRICTION;
    ball.vel[1] *= BALL_FRICTION;
    if ball.vel[0].hypot(ball.vel[1]) < 1e-5 {
        ball.vel[0] = 0.0;
        ball.vel[1] = 0.0;
    }

    let mut exit = None;
    if x1.abs() > PITCH_HALF_LENGTH {
        let line = PITCH_HALF_LENGTH.copysign(x1);
        let t = (line - x0) / (x1 - x0);
        let y_cross = y0 + t * (y1 - y0);
        if y_cross.abs() <= PITCH_HALF_WIDTH {
            // the side whose goal line it is
            let side = if line > 0.0 { Team::Right } else { Team::Left };
            exit = Some(if y_cross.abs() <= GOAL_HALF_WIDTH {
                BallExit::Goal(side.opponent())
            } else {
                BallExit::GoalLine {
                    side,
                    at: [line, y_cross],
                }
            });
            x1 = line;
            y1 = y_cross;
        }
    }
    if exit.is_none() && y1.abs() > PITCH_HALF_WIDTH {
        let line = PITCH_HALF_WIDTH.copysign(y1);
        let t = (line - y0) / (y1 - y0);
        let x_cross = (x0 + t * (x1 - x0)).clamp(-PITCH_HALF_LENGTH, PITCH_HALF_LENGTH);
        exit = Some(BallExit::Touchline {
            at: [x_cross, line],
        });
        x1 = x_cross;
        y1 = line;
    }
    ball.pos = [
        x1.clamp(-PITCH_HALF_LENGTH, PITCH_HALF_LENGTH),
        y1.clamp(-PITCH_HALF_WIDTH, PITCH_HALF_WIDTH),
        z,
    ];
    if exit.is_some() {
        ball.vel = [0.0; 3];
    }
    if ball.cooldown > 0 {
        ball.cooldown -= 1;
        if ball.cooldown == 0 {
            ball.kicker = None;
        }
    }
    exit
}
