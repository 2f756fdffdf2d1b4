//! Line-delimited JSON episode dumps.
//!
//! One record per line:
//!
//! ```text
//! {"ball":[x,y,z],"ball_direction":[x,y,z],"left_team":[[x,y],…],
//!  "left_team_direction":[[x,y],…],"left_team_tired_factor":[…],
//!  "right_team":…,"right_team_direction":…,"right_team_tired_factor":…,
//!  "active":0,"score":[0,0],"steps_left":3000,"game_mode":0,
//!  "action":5,"reward":0.1,"done":false}
//! ```

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate_obs, GameMode, Observation, PlayerObs, Violation};
use crate::gnn::NUM_ACTIONS;

/// One step of a recorded episode: the observation the action was taken in,
/// the action, and what it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpRecord {
    pub obs: Observation,
    pub action: usize,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid record: {}", join(.violations))]
    Invalid {
        line: usize,
        violations: Vec<Violation>,
    },
    #[error("line {line}: {source}")]
    Io { line: usize, source: io::Error },
}

impl DumpError {
    pub fn line(&self) -> usize {
        match self {
            DumpError::Parse { line, .. }
            | DumpError::Invalid { line, .. }
            | DumpError::Io { line, .. } => *line,
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRecord {
    ball: [f64; 3],
    ball_direction: [f64; 3],
    left_team: Vec<[f64; 2]>,
    left_team_direction: Vec<[f64; 2]>,
    left_team_tired_factor: Vec<f64>,
    right_team: Vec<[f64; 2]>,
    right_team_direction: Vec<[f64; 2]>,
    right_team_tired_factor: Vec<f64>,
    active: i64,
    score: [u32; 2],
    steps_left: u32,
    game_mode: i64,
    action: i64,
    reward: f64,
    done: bool,
}

fn team_to_wire(team: &[PlayerObs]) -> (Vec<[f64; 2]>, Vec<[f64; 2]>, Vec<f64>) {
    (
        team.iter().map(|p| p.pos).collect(),
        team.iter().map(|p| p.dir).collect(),
        team.iter().map(|p| p.tired).collect(),
    )
}

fn team_from_wire(
    name: &str,
    pos: &[[f64; 2]],
    dir: &[[f64; 2]],
    tired: &[f64],
    violations: &mut Vec<Violation>,
) -> Vec<PlayerObs> {
    if dir.len() != pos.len() {
        violations.push(Violation::new(
            format!("{name}_direction"),
            format!("expected {} entries, got {}", pos.len(), dir.len()),
        ));
    }
    if tired.len() != pos.len() {
        violations.push(Violation::new(
            format!("{name}_tired_factor"),
            format!("expected {} entries, got {}", pos.len(), tired.len()),
        ));
    }
    pos.iter()
        .enumerate()
        .map(|(i, &p)| PlayerObs {
            pos: p,
            dir: dir.get(i).copied().unwrap_or_default(),
            tired: tired.get(i).copied().unwrap_or_default(),
        })
        .collect()
}

impl From<&DumpRecord> for WireRecord {
    fn from(r: &DumpRecord) -> Self {
        let (left_team, left_team_direction, left_team_tired_factor) =
            team_to_wire(&r.obs.left_team);
        let (right_team, right_team_direction, right_team_tired_factor) =
            team_to_wire(&r.obs.right_team);
        WireRecord {
            ball: r.obs.ball_pos,
            ball_direction: r.obs.ball_dir,
            left_team,
            left_team_direction,
            left_team_tired_factor,
            right_team,
            right_team_direction,
            right_team_tired_factor,
            active: r.obs.active as i64,
            score: [r.obs.score.0, r.obs.score.1],
            steps_left: r.obs.steps_left,
            game_mode: i64::from(r.obs.game_mode.index()),
            action: r.action as i64,
            reward: r.reward,
            done: r.done,
        }
    }
}

impl WireRecord {
    fn into_record(self) -> Result<DumpRecord, Vec<Violation>> {
        let mut violations = Vec::new();
        let left_team = team_from_wire(
            "left_team",
            &self.left_team,
            &self.left_team_direction,
            &self.left_team_tired_factor,
            &mut violations,
        );
        let right_team = team_from_wire(
            "right_team",
            &self.right_team,
            &self.right_team_direction,
            &self.right_team_tired_factor,
            &mut violations,
        );
        let game_mode = GameMode::from_index(self.game_mode).unwrap_or_else(|| {
            violations.push(Violation::new(
                "game_mode",
                format!("{} not in 0..=6", self.game_mode),
            ));
            GameMode::Normal
        });
        let active = usize::try_from(self.active).unwrap_or(usize::MAX);
        let action = match usize::try_from(self.action) {
            Ok(a) if a < NUM_ACTIONS => a,
            _ => {
                violations.push(Violation::new(
                    "action",
                    format!("{} not in 0..=18", self.action),
                ));
                0
            }
        };
        if !self.reward.is_finite() {
            violations.push(Violation::new("reward", "non-finite"));
        }
        let obs = Observation {
            ball_pos: self.ball,
            ball_dir: self.ball_direction,
            left_team,
            right_team,
            active,
            score: (self.score[0], self.score[1]),
            steps_left: self.steps_left,
            game_mode,
        };
        if let Err(v) = validate_obs(&obs) {
            violations.extend(v);
        }
        if violations.is_empty() {
            Ok(DumpRecord {
                obs,
                action,
                reward: self.reward,
                done: self.done,
            })
        } else {
            Err(violations)
        }
    }
}

/// Serializes one record as a single JSON line (no trailing newline).
pub fn to_dump_line(record: &DumpRecord) -> String {
    serde_json::to_string(&WireRecord::from(record)).expect("plain data serializes")
}

/// Parses one dump line; `line` is only used for error reporting.
pub fn parse_dump_line(text: &str, line: usize) -> Result<DumpRecord, DumpError> {
    let wire: WireRecord = serde_json::from_str(text).map_err(|e| DumpError::Parse {
        line,
        message: e.to_string(),
    })?;
    wire.into_record()
        .map_err(|violations| DumpError::Invalid { line, violations })
}

/// Lazily parses a dump stream. Blank lines are skipped but still counted.
pub fn parse_obs_dump<R: BufRead>(reader: R) -> DumpReader<R> {
    DumpReader { reader, line: 0 }
}

pub struct DumpReader<R> {
    reader: R,
    line: usize,
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<DumpRecord, DumpError>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = String::new();
        loop {
            buf.clear();
            self.line += 1;
            match self.reader.read_line(&mut buf) {
                Ok(0) => return None,
                Ok(_) => {
                    let text = buf.trim();
                    if text.is_empty() {
                        continue;
                    }
                    return Some(parse_dump_line(text, self.line));
                }
                Err(source) => {
                    return Some(Err(DumpError::Io {
                        line: self.line,
                        source,
                    }))
                }
            }
        }
    }
}

/// Writes newline-terminated dump records.
pub struct DumpWriter<W: Write> {
    out: W,
}

impl<W: Write> DumpWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn write(&mut self, record: &DumpRecord) -> io::Result<()> {
        writeln!(self.out, "{}", to_dump_line(record))
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
