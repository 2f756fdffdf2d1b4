use std::fmt;

/// Pitch half-length along x.
pub const PITCH_HALF_LENGTH: f64 = 1.0;
/// Pitch half-width along y.
pub const PITCH_HALF_WIDTH: f64 = 0.42;
pub const PLAYERS_PER_TEAM: usize = 11;

/// Restart state of the match, numbered as in the football environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GameMode {
    #[default]
    Normal = 0,
    KickOff = 1,
    GoalKick = 2,
    FreeKick = 3,
    Corner = 4,
    ThrowIn = 5,
    Penalty = 6,
}

impl GameMode {
    pub const ALL: [GameMode; 7] = [
        GameMode::Normal,
        GameMode::KickOff,
        GameMode::GoalKick,
        GameMode::FreeKick,
        GameMode::Corner,
        GameMode::ThrowIn,
        GameMode::Penalty,
    ];

    pub fn from_index(i: i64) -> Option<Self> {
        usize::try_from(i)
            .ok()
            .and_then(|i| Self::ALL.get(i).copied())
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlayerObs {
    pub pos: [f64; 2],
    pub dir: [f64; 2],
    pub tired: f64,
}

/// Structured game state as seen by the controlled team (attacking +x).
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub ball_pos: [f64; 3],
    pub ball_dir: [f64; 3],
    pub left_team: Vec<PlayerObs>,
    pub right_team: Vec<PlayerObs>,
    /// Index into `left_team` of the controlled player.
    pub active: usize,
    pub score: (u32, u32),
    pub steps_left: u32,
    pub game_mode: GameMode,
}

/// One invariant violation, addressed by field path.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn check_range(out: &mut Vec<Violation>, field: String, value: f64, lo: f64, hi: f64) {
    if !value.is_finite() {
        out.push(Violation::new(field, format!("non-finite value {value}")));
    } else if value < lo || value > hi {
        out.push(Violation::new(
            field,
            format!("{value} outside [{lo}, {hi}]"),
        ));
    }
}

fn check_finite(out: &mut Vec<Violation>, field: String, value: f64) {
    if !value.is_finite() {
        out.push(Violation::new(field, format!("non-finite value {value}")));
    }
}

fn check_team(out: &mut Vec<Violation>, name: &str, team: &[PlayerObs]) {
    if team.len() != PLAYERS_PER_TEAM {
        out.push(Violation::new(
            name,
            format!("expected {PLAYERS_PER_TEAM} players, got {}", team.len()),
        ));
    }
    for (i, p) in team.iter().enumerate() {
        check_range(
            out,
            format!("{name}[{i}].x"),
            p.pos[0],
            -PITCH_HALF_LENGTH,
            PITCH_HALF_LENGTH,
        );
        check_range(
            out,
            format!("{name}[{i}].y"),
            p.pos[1],
            -PITCH_HALF_WIDTH,
            PITCH_HALF_WIDTH,
        );
        check_finite(out, format!("{name}_direction[{i}].x"), p.dir[0]);
        check_finite(out, format!("{name}_direction[{i}].y"), p.dir[1]);
        check_range(out, format!("{name}_tired_factor[{i}]"), p.tired, 0.0, 1.0);
    }
}

/// Every invariant violation in `obs`; `Ok` when there are none.
pub fn validate_obs(obs: &Observation) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    check_team(&mut out, "left_team", &obs.left_team);
    check_team(&mut out, "right_team", &obs.right_team);
    check_range(
        &mut out,
        "ball.x".into(),
        obs.ball_pos[0],
        -PITCH_HALF_LENGTH,
        PITCH_HALF_LENGTH,
    );
    check_range(
        &mut out,
        "ball.y".into(),
        obs.ball_pos[1],
        -PITCH_HALF_WIDTH,
        PITCH_HALF_WIDTH,
    );
    check_range(&mut out, "ball.z".into(), obs.ball_pos[2], 0.0, f64::MAX);
    for (axis, v) in ["x", "y", "z"].iter().zip(obs.ball_dir) {
        check_finite(&mut out, format!("ball_direction.{axis}"), v);
    }
    if obs.active >= PLAYERS_PER_TEAM || obs.active >= obs.left_team.len() {
        out.push(Violation::new(
            "active",
            format!("index {} is not a left-team player", obs.active),
        ));
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
