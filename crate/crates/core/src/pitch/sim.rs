use rand::Rng;

use crate::numeric::RngStream;
use crate::obs::{GameMode, Observation, PITCH_HALF_LENGTH, PITCH_HALF_WIDTH, PLAYERS_PER_TEAM};

use super::opponent::scripted_opponent_policy;
use super::physics::*;
use super::reward::{checkpoint_reward, mark_reached_bands};
use super::state::{
    clamp_to_pitch, distance, toward, Ball, Control, PitchState, Player, Team, CHECKPOINT_COUNT,
};
use super::{Action, PitchError, Scenario, ScenarioKind};

/// Left-team formation; the right team mirrors x.
const FORMATION: [[f64; 2]; PLAYERS_PER_TEAM] = [
    [-0.95, 0.0],
    [-0.7, -0.3],
    [-0.7, -0.1],
    [-0.7, 0.1],
    [-0.7, 0.3],
    [-0.4, -0.3],
    [-0.4, -0.1],
    [-0.4, 0.1],
    [-0.4, 0.3],
    [-0.15, -0.15],
    [-0.15, 0.15],
];
const KICKOFF_TAKER: usize = 10;
const EMPTY_GOAL_START: [f64; 2] = [0.4, 0.0];
const FORMATION_JITTER: f64 = 0.01;
const EMPTY_GOAL_JITTER: f64 = 0.02;
/// How far teammates shift their line with the ball.
const SUPPORT_SHIFT: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    pub ball_owner: Option<usize>,
    /// Team that scored this tick.
    pub goal: Option<Team>,
    pub score: (u32, u32),
    pub scoring_reward: f64,
    pub checkpoint_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub obs: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// The toy football simulator. One instance runs one episode at a time.
#[derive(Debug, Clone)]
pub struct Pitch {
    state: PitchState,
}

enum Event {
    Goal(Team),
    GoalLine { side: Team, at: [f64; 2] },
    Touchline { at: [f64; 2] },
}

impl Pitch {
    /// Creates a simulator already reset with seed 0.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            state: initial_state(scenario, 0),
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.state.scenario
    }

    pub fn state(&self) -> &PitchState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.state.done
    }

    pub fn reset(&mut self, seed: u64) -> Observation {
        self.state = initial_state(self.state.scenario.clone(), seed);
        self.state.observation()
    }

    pub fn step(&mut self, action: usize) -> Result<StepOutcome, PitchError> {
        if self.state.done {
            return Err(PitchError::EpisodeOver);
        }
        let action = Action::from_index(action).ok_or(PitchError::InvalidAction(action))?;
        let prev = self.state.clone();
        let mut next = prev.clone();
        next.game_mode = GameMode::Normal;

        apply_control(&mut next, action);
        apply_opponents(&mut next);
        move_teammates(&mut next);
        integrate_players(&mut next);

        let event = update_ball(&mut next);
        if event.is_none() {
            resolve_possession(&mut next);
        }

        let cp = checkpoint_reward(&prev, &mut next);
        let mut scoring = 0.0;
        let mut goal = None;
        match event {
            Some(Event::Goal(team)) => {
                goal = Some(team);
                match team {
                    Team::Left => {
                        next.score.0 += 1;
                        scoring = 1.0;
                    }
                    Team::Right => {
                        next.score.1 += 1;
                        scoring = -1.0;
                    }
                }
                match next.scenario.kind {
                    ScenarioKind::EmptyGoal => next.done = true,
                    ScenarioKind::Match => kickoff_restart(&mut next, team.opponent()),
                }
            }
            Some(Event::GoalLine { side, at }) => match next.scenario.kind {
                ScenarioKind::EmptyGoal => next.done = true,
                ScenarioKind::Match => goal_line_restart(&mut next, side, at),
            },
            Some(Event::Touchline { at }) => match next.scenario.kind {
                ScenarioKind::EmptyGoal => next.done = true,
                ScenarioKind::Match => throw_in(&mut next, at),
            },
            None => {}
        }

        if next.scenario.kind == ScenarioKind::EmptyGoal && ball_is_dead(&next) {
            next.done = true;
        }

        switch_controlled(&mut next);
        next.step += 1;
        if next.step >= next.scenario.episode_length {
            next.done = true;
        }
        self.state = next;
        let info = StepInfo {
            ball_owner: self.state.ball.owner,
            goal,
            score: self.state.score,
            scoring_reward: scoring,
            checkpoint_reward: cp,
        };
        Ok(StepOutcome {
            obs: self.state.observation(),
            reward: scoring + cp,
            done: self.state.done,
            info,
        })
    }
}

/// A loose ball lying still on the ground.
fn ball_is_dead(state: &PitchState) -> bool {
    let b = &state.ball;
    b.owner.is_none() && b.vel == [0.0; 3] && b.pos[2] == 0.0
}

fn initial_state(scenario: Scenario, seed: u64) -> PitchState {
    let mut rng = RngStream::from_seed(seed).split("pitch");
    let empty = scenario.kind == ScenarioKind::EmptyGoal;
    let mut players = Vec::with_capacity(2 * PLAYERS_PER_TEAM);
    for team in [Team::Left, Team::Right] {
        for (i, spot) in FORMATION.iter().enumerate() {
            let home = match team {
                Team::Left => *spot,
                Team::Right => [-spot[0], spot[1]],
            };
            let mut pos = home;
            if !empty {
                pos[0] += rng.gen_range(-FORMATION_JITTER..=FORMATION_JITTER);
                pos[1] += rng.gen_range(-FORMATION_JITTER..=FORMATION_JITTER);
            }
            let active = !empty || (team == Team::Left && i == KICKOFF_TAKER);
            players.push(Player {
                pos: clamp_to_pitch(pos),
                vel: [0.0, 0.0],
                tired: 0.0,
                home,
                active,
            });
        }
    }
    let (ball_xy, game_mode) = if empty {
        let start = [
            EMPTY_GOAL_START[0],
            EMPTY_GOAL_START[1] + rng.gen_range(-EMPTY_GOAL_JITTER..=EMPTY_GOAL_JITTER),
        ];
        (start, GameMode::Normal)
    } else {
        ([0.0, 0.0], GameMode::KickOff)
    };
    players[KICKOFF_TAKER].pos = ball_xy;
    let mut control = Control::default();
    let mut ball_vel = [0.0; 3];
    if empty {
        // the attacker receives the ball in stride, running at goal
        control.direction = Some([1.0, 0.0]);
        players[KICKOFF_TAKER].vel = [SPEED, 0.0];
        ball_vel = [SPEED, 0.0, 0.0];
    }
    let mut state = PitchState {
        scenario,
        players,
        ball: Ball {
            pos: [ball_xy[0], ball_xy[1], 0.0],
            vel: ball_vel,
            owner: Some(KICKOFF_TAKER),
            last_touch: Some(Team::Left),
            kicker: None,
            cooldown: 0,
        },
        score: (0, 0),
        step: 0,
        rng,
        checkpoints: [false; CHECKPOINT_COUNT],
        controlled: KICKOFF_TAKER,
        control,
        game_mode,
        done: false,
    };
    mark_reached_bands(&mut state);
    state
}

fn chance(rng: &mut RngStream, p: f64) -> bool {
    p > 0.0 && rng.gen::<f64>() < p
}

fn nearest_active(state: &PitchState, team: Team, to: [f64; 2]) -> Option<usize> {
    team.players()
        .filter(|&i| state.players[i].active)
        .min_by(|&a, &b| {
            distance(state.players[a].pos, to)
                .total_cmp(&distance(state.players[b].pos, to))
                .then(a.cmp(&b))
        })
}

fn pass_target(state: &PitchState, passer: usize, long: bool) -> Option<[f64; 2]> {
    let from = state.players[passer].pos;
    let mates = Team::of(passer)
        .players()
        .filter(|&i| i != passer && state.players[i].active);
    if long {
        // furthest forward teammate
        let sign = if Team::of(passer) == Team::Left {
            1.0
        } else {
            -1.0
        };
        mates
            .max_by(|&a, &b| {
                (sign * state.players[a].pos[0])
                    .total_cmp(&(sign * state.players[b].pos[0]))
                    .then(b.cmp(&a))
            })
            .map(|i| state.players[i].pos)
    } else {
        mates
            .min_by(|&a, &b| {
                distance(state.players[a].pos, from)
                    .total_cmp(&distance(state.players[b].pos, from))
                    .then(a.cmp(&b))
            })
            .map(|i| state.players[i].pos)
    }
}

fn facing(state: &PitchState, player: usize) -> [f64; 2] {
    let p = &state.players[player];
    let v = p.vel;
    let n = v[0].hypot(v[1]);
    if n > 1e-12 {
        [v[0] / n, v[1] / n]
    } else {
        [
            if Team::of(player) == Team::Left {
                1.0
            } else {
                -1.0
            },
            0.0,
        ]
    }
}

fn apply_control(state: &mut PitchState, action: Action) {
    let me = state.controlled;
    let control = &mut state.control;
    match action {
        Action::Sprint => control.sprint = true,
        Action::ReleaseSprint => control.sprint = false,
        Action::Dribble => control.dribble = true,
        Action::ReleaseDribble => control.dribble = false,
        Action::ReleaseDirection => control.direction = None,
        _ => {}
    }
    if let Some(d) = action.direction() {
        control.direction = Some(d);
    }

    let owns = state.ball.owner == Some(me);
    match action {
        Action::Shot if owns => {
            let aim = state.control.direction.map_or(0.0, |d| d[1]);
            let target = [PITCH_HALF_LENGTH, 0.5 * GOAL_HALF_WIDTH * aim];
            kick(&mut state.ball, me, target, SHOT_SPEED, 0.0);
        }
        Action::ShortPass | Action::LongPass | Action::HighPass if owns => {
            let long = action != Action::ShortPass;
            let from = state.players[me].pos;
            let target = pass_target(state, me, long).unwrap_or_else(|| {
                let f = facing(state, me);
                let d = if long {
                    LONG_PASS_DEFAULT
                } else {
                    SHORT_PASS_DEFAULT
                };
                clamp_to_pitch([from[0] + f[0] * d, from[1] + f[1] * d])
            });
            let lift = if action == Action::HighPass {
                HIGH_PASS_LIFT
            } else {
                0.0
            };
            let speed = rolling_speed(distance(from, target));
            kick(&mut state.ball, me, target, speed, lift);
        }
        Action::Slide => {
            let ball = [state.ball.pos[0], state.ball.pos[1]];
            let near = distance(state.players[me].pos, ball) <= SLIDE_RADIUS
                && state.ball.pos[2] <= CONTROL_HEIGHT;
            match state.ball.owner {
                Some(o) if Team::of(o) == Team::Right && near => {
                    if chance(&mut state.rng, SLIDE_SUCCESS) {
                        take_ball(state, me);
                    }
                }
                None if near && state.ball.kicker != Some(me) => take_ball(state, me),
                _ => {}
            }
        }
        _ => {}
    }

    let c = state.control;
    let mut speed = if c.sprint { SPRINT_SPEED } else { SPEED };
    if c.dribble {
        speed *= DRIBBLE_FACTOR;
    }
    state.players[me].vel = c
        .direction
        .map_or([0.0, 0.0], |d| [d[0] * speed, d[1] * speed]);
}

fn apply_opponents(state: &mut PitchState) {
    let intents = scripted_opponent_policy(state, state.scenario.difficulty);
    for (slot, intent) in intents.into_iter().enumerate() {
        let i = PLAYERS_PER_TEAM + slot;
        state.players[i].vel = intent.velocity;
        if let Some(target) = intent.shot_target {
            if state.ball.owner == Some(i) {
                kick(&mut state.ball, i, target, SHOT_SPEED, 0.0);
            }
        }
    }
}

fn move_teammates(state: &mut PitchState) {
    let ball_x = state.ball.pos[0];
    for i in Team::Left.players() {
        if i == state.controlled || !state.players[i].active {
            continue;
        }
        let p = &state.players[i];
        let spot = clamp_to_pitch([p.home[0] + SUPPORT_SHIFT * ball_x, p.home[1]]);
        state.players[i].vel = toward(p.pos, spot, SPEED);
    }
}

fn integrate_players(state: &mut PitchState) {
    let sprinting = state.control.sprint && state.control.direction.is_some();
    for (i, p) in state.players.iter_mut().enumerate() {
        if !p.active {
            p.vel = [0.0, 0.0];
            continue;
        }
        p.pos = clamp_to_pitch([p.pos[0] + p.vel[0], p.pos[1] + p.vel[1]]);
        p.tired = if i == state.controlled && sprinting {
            (p.tired + TIRE_RATE).min(1.0)
        } else {
            (p.tired - RECOVER_RATE).max(0.0)
        };
    }
}

fn update_ball(state: &mut PitchState) -> Option<Event> {
    if let Some(o) = state.ball.owner {
        let p = &state.players[o];
        state.ball.pos = [p.pos[0], p.pos[1], 0.0];
        state.ball.vel = [p.vel[0], p.vel[1], 0.0];
        // carried over the line between the posts
        if p.pos[0].abs() >= PITCH_HALF_LENGTH && p.pos[1].abs() <= GOAL_HALF_WIDTH {
            let scorer = if p.pos[0] > 0.0 {
                Team::Left
            } else {
                Team::Right
            };
            return Some(Event::Goal(scorer));
        }
        return None;
    }
    integrate_free_ball(&mut state.ball).map(|exit| match exit {
        BallExit::Goal(t) => Event::Goal(t),
        BallExit::GoalLine { side, at } => Event::GoalLine { side, at },
        BallExit::Touchline { at } => Event::Touchline { at },
    })
}

fn take_ball(state: &mut PitchState, player: usize) {
    let p = &state.players[player];
    state.ball.owner = Some(player);
    state.ball.pos = [p.pos[0], p.pos[1], 0.0];
    state.ball.vel = [p.vel[0], p.vel[1], 0.0];
    state.ball.last_touch = Some(Team::of(player));
    state.ball.kicker = None;
    state.ball.cooldown = 0;
}

fn resolve_possession(state: &mut PitchState) {
    let ball = [state.ball.pos[0], state.ball.pos[1]];
    match state.ball.owner {
        None => {
            if state.ball.pos[2] > CONTROL_HEIGHT {
                return;
            }
            let kicker = state.ball.kicker;
            let winner = (0..state.players.len())
                .filter(|&i| state.players[i].active && Some(i) != kicker)
                .filter(|&i| distance(state.players[i].pos, ball) <= CONTROL_RADIUS)
                .min_by(|&a, &b| {
                    distance(state.players[a].pos, ball)
                        .total_cmp(&distance(state.players[b].pos, ball))
                        .then(a.cmp(&b))
                });
            if let Some(w) = winner {
                take_ball(state, w);
            }
        }
        Some(owner) => {
            let team = Team::of(owner);
            let Some(tackler) = nearest_active(state, team.opponent(), ball) else {
                return;
            };
            if distance(state.players[tackler].pos, ball) > TACKLE_RADIUS {
                return;
            }
            let p = match team {
                Team::Left => {
                    let dribbling = owner == state.controlled && state.control.dribble;
                    RIGHT_STEAL * state.scenario.difficulty * if dribbling { 0.5 } else { 1.0 }
                }
                Team::Right => LEFT_STEAL,
            };
            if chance(&mut state.rng, p) {
                take_ball(state, tackler);
            }
        }
    }
}

fn place_with_ball(state: &mut PitchState, player: usize, at: [f64; 2]) {
    state.players[player].pos = clamp_to_pitch(at);
    state.players[player].vel = [0.0, 0.0];
    take_ball(state, player);
}

fn kickoff_restart(state: &mut PitchState, taker_team: Team) {
    for p in state.players.iter_mut() {
        p.pos = p.home;
        p.vel = [0.0, 0.0];
    }
    let taker = match taker_team {
        Team::Left => KICKOFF_TAKER,
        Team::Right => PLAYERS_PER_TEAM + KICKOFF_TAKER,
    };
    place_with_ball(state, taker, [0.0, 0.0]);
    state.game_mode = GameMode::KickOff;
}

fn goal_line_restart(state: &mut PitchState, side: Team, at: [f64; 2]) {
    let defending_touched = state.ball.last_touch == Some(side);
    if defending_touched {
        let corner = [at[0], PITCH_HALF_WIDTH.copysign(at[1])];
        let taker = nearest_active(state, side.opponent(), corner);
        if let Some(t) = taker {
            place_with_ball(state, t, corner);
        }
        state.game_mode = GameMode::Corner;
    } else {
        let keeper = match side {
            Team::Left => 0,
            Team::Right => PLAYERS_PER_TEAM,
        };
        let spot = [at[0] - 0.05f64.copysign(at[0]), 0.0];
        place_with_ball(state, keeper, spot);
        state.game_mode = GameMode::GoalKick;
    }
}

fn throw_in(state: &mut PitchState, at: [f64; 2]) {
    let team = state.ball.last_touch.map_or(Team::Left, Team::opponent);
    if let Some(t) = nearest_active(state, team, at) {
        place_with_ball(state, t, at);
    }
    state.game_mode = GameMode::ThrowIn;
}

fn switch_controlled(state: &mut PitchState) {
    if let Some(o) = state.ball.owner {
        if Team::of(o) == Team::Left {
            state.controlled = o;
            return;
        }
    }
    let ball = [state.ball.pos[0], state.ball.pos[1]];
    if let Some(n) = nearest_active(state, Team::Left, ball) {
        state.controlled = n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obs::validate_obs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pitch(name: &str) -> Pitch {
        Pitch::new(Scenario::by_name(name).unwrap())
    }

    fn random_actions(seed: u64, n: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(0..19)).collect()
    }

    #[test]
    fn reset_is_deterministic() {
        let mut a = pitch("easy");
        let mut b = pitch("easy");
        assert_eq!(a.reset(7), b.reset(7));
        assert_ne!(a.reset(7), a.reset(8));
    }

    #[test]
    fn kickoff_convention() {
        let obs = pitch("hard").reset(1);
        assert_eq!(obs.ball_pos, [0.0, 0.0, 0.0]);
        assert_eq!(obs.score, (0, 0));
        assert_eq!(obs.game_mode, GameMode::KickOff);
        assert!(validate_obs(&obs).is_ok());
    }

    #[test]
    fn empty_goal_keeps_full_teams() {
        let mut p = pitch("empty_goal_1v0");
        let obs = p.reset(3);
        assert_eq!((obs.left_team.len(), obs.right_team.len()), (11, 11));
        assert!(validate_obs(&obs).is_ok());
        assert_eq!(p.state().players.iter().filter(|p| p.active).count(), 1);
    }

    #[test]
    fn idle_tick_from_kickoff() {
        let mut p = pitch("easy");
        p.reset(7);
        let out = p.step(Action::Idle.index()).unwrap();
        assert_eq!(out.obs.ball_pos, [0.0, 0.0, 0.0]);
        assert_eq!(out.reward, 0.0);
        assert!(!out.done);
    }

    #[test]
    fn invalid_action_and_step_after_done() {
        let mut p = pitch("empty_goal_1v0");
        p.reset(0);
        assert_eq!(p.step(19).unwrap_err(), PitchError::InvalidAction(19));
        let mut p = Pitch::new(Scenario::by_name("easy").unwrap().with_episode_length(2));
        p.reset(0);
        p.step(0).unwrap();
        assert!(p.step(0).unwrap().done);
        assert_eq!(p.step(0).unwrap_err(), PitchError::EpisodeOver);
    }

    // Replays the trajectory: each band is paid the first tick the left team
    // holds the ball at or past its threshold.
    fn scan_checkpoint_rewards(states: &[PitchState]) -> Vec<f64> {
        let thresholds: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let mut paid = [false; 10];
        let s0 = &states[0];
        if s0.ball.owner.is_some_and(|o| o < 11) {
            for (k, t) in thresholds.iter().enumerate() {
                paid[k] |= s0.ball.pos[0] >= *t;
            }
        }
        let mut out = Vec::new();
        for s in &states[1..] {
            let mut r = 0.0;
            if s.ball.owner.is_some_and(|o| o < 11) {
                for (k, t) in thresholds.iter().enumerate() {
                    if !paid[k] && s.ball.pos[0] >= *t {
                        paid[k] = true;
                        r += 0.1;
                    }
                }
            }
            out.push(r);
        }
        out
    }

    #[test]
    fn dribbling_right_pays_each_band_once_then_scores() {
        let mut p = pitch("empty_goal_1v0");
        p.reset(5);
        let mut states = vec![p.state().clone()];
        let mut rewards = Vec::new();
        let mut last = None;
        for _ in 0..200 {
            let out = p.step(Action::Right.index()).unwrap();
            states.push(p.state().clone());
            rewards.push(out.info.checkpoint_reward);
            let done = out.done;
            last = Some(out);
            if done {
                break;
            }
        }
        let last = last.unwrap();
        assert_eq!(last.info.goal, Some(Team::Left));
        assert_eq!(last.info.score, (1, 0));
        // started at x=0.4 so bands 0.5 … 1.0 are paid
        let total: f64 = rewards.iter().sum();
        assert!((total - 0.6).abs() < 1e-9, "{total}");
        // the goal tick pays the scoring term on top of its band bonus
        assert!((last.reward - 1.0 - last.info.checkpoint_reward).abs() < 1e-12);
        let oracle = scan_checkpoint_rewards(&states);
        for (a, b) in rewards.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn shot_goal_pays_no_remaining_bands() {
        let mut p = pitch("empty_goal_1v0");
        p.reset(2);
        let mut total = 0.0;
        let mut out = None;
        for _ in 0..40 {
            let o = p.step(Action::Right.index()).unwrap();
            total += o.reward;
        }
        for _ in 0..60 {
            let o = p.step(Action::Shot.index()).unwrap();
            total += o.reward;
            if o.done {
                out = Some(o);
                break;
            }
        }
        let out = out.expect("shot ends the episode");
        assert_eq!(out.info.goal, Some(Team::Left));
        assert_eq!(out.info.checkpoint_reward, 0.0);
        let cp: f64 = p.state().checkpoints.iter().filter(|f| **f).count() as f64 * 0.1;
        // bands paid so far plus the goal; the untouched ones stay unpaid
        assert!(p.state().checkpoints.iter().any(|f| !f));
        assert!((total - 1.0 - (cp - 0.4)).abs() < 1e-9, "{total} {cp}");
    }

    #[test]
    fn empty_goal_attacker_starts_running() {
        let mut p = pitch("empty_goal_1v0");
        let obs = p.reset(4);
        assert_eq!(obs.left_team[KICKOFF_TAKER].dir, [SPEED, 0.0]);
        let x0 = p.state().players[KICKOFF_TAKER].pos[0];
        p.step(Action::Idle.index()).unwrap();
        assert!((p.state().players[KICKOFF_TAKER].pos[0] - x0 - SPEED).abs() < 1e-12);
        assert_eq!(p.state().ball.owner, Some(KICKOFF_TAKER));
    }

    #[test]
    fn empty_goal_ends_when_a_loose_ball_stops() {
        let mut p = pitch("empty_goal_1v0");
        p.reset(4);
        p.step(Action::ReleaseDirection.index()).unwrap();
        let mut steps = 0;
        let mut out = p.step(Action::ShortPass.index()).unwrap();
        while !out.done {
            steps += 1;
            out = p.step(Action::Idle.index()).unwrap();
        }
        assert!(steps < 100, "{steps}");
        assert_eq!(out.info.goal, None);
        assert_eq!(p.state().ball.owner, None);
        assert_eq!(p.state().ball.vel, [0.0; 3]);
    }

    #[test]
    fn emitted_observations_are_valid_and_bounded() {
        for name in ["easy", "hard", "kaggle", "empty_goal_1v0"] {
            let mut p = pitch(name);
            p.reset(11);
            for a in random_actions(11, 3000) {
                if p.is_done() {
                    break;
                }
                let out = p.step(a).unwrap();
                assert!(
                    validate_obs(&out.obs).is_ok(),
                    "{name}: {:?}",
                    validate_obs(&out.obs)
                );
                assert!(p.state().ball.owner.is_none_or(|o| o < 22));
            }
        }
    }

    #[test]
    fn total_reward_matches_trajectory_scan() {
        let mut p = pitch("competition");
        p.reset(21);
        let mut states = vec![p.state().clone()];
        let mut rewards = Vec::new();
        let mut goals = 0.0;
        for a in random_actions(21, 3000) {
            if p.is_done() {
                break;
            }
            let out = p.step(a).unwrap();
            states.push(p.state().clone());
            rewards.push(out.info.checkpoint_reward);
            goals += out.info.scoring_reward;
        }
        let cp: f64 = rewards.iter().sum();
        let oracle: f64 = scan_checkpoint_rewards(&states).iter().sum();
        assert!((cp - oracle).abs() < 1e-9, "{cp} vs {oracle}");
        assert!((0.0..=1.0 + 1e-12).contains(&cp));
        let (l, r) = p.state().score;
        assert_eq!(goals, l as f64 - r as f64);
    }

    #[test]
    fn replaying_actions_reproduces_episode() {
        let actions = random_actions(4, 3000);
        let run = || {
            let mut p = pitch("hard");
            p.reset(4);
            let mut outs = Vec::new();
            for &a in &actions {
                if p.is_done() {
                    break;
                }
                outs.push(p.step(a).unwrap());
            }
            outs
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn scripted_attacker_beats_empty_goal() {
        let mut p = pitch("empty_goal_1v0");
        for seed in 0..20 {
            p.reset(seed);
            let mut ret = 0.0;
            while !p.is_done() {
                ret += p.step(Action::Right.index()).unwrap().reward;
            }
            assert!(ret >= 1.0, "seed {seed}: {ret}");
        }
    }

    #[test]
    fn hard_opponents_take_the_ball() {
        let mut p = pitch("kaggle");
        p.reset(9);
        let mut right_owned = false;
        for _ in 0..400 {
            p.step(Action::Idle.index()).unwrap();
            right_owned |= p.state().ball_owner_team() == Some(Team::Right);
        }
        assert!(right_owned);
        let mut p = pitch("easy");
        p.reset(9);
        let before: Vec<_> = p.state().players[11..].iter().map(|p| p.pos).collect();
        p.step(0).unwrap();
        let moved = p.state().players[11..]
            .iter()
            .zip(&before)
            .filter(|(a, b)| a.pos != **b)
            .count();
        assert!(moved > 0);
    }
}
