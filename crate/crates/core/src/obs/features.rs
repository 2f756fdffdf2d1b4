//! Observation → 24-node graph.
//!
//! Node order is fixed: left players 0–10, right players 11–21, ball 22,
//! global node 23. Every node carries 9 feature slots:
//!
//! | slot | player            | ball        | global                          |
//! |------|-------------------|-------------|---------------------------------|
//! | 0–1  | position x, y     | position    | score diff / 5, steps left / 3000 |
//! | 2–3  | direction x, y    | direction   | game mode / 6, 0                |
//! | 4    | 0                 | 1 (is_ball) | 0                               |
//! | 5    | 1 if left team    | 0           | 0                               |
//! | 6    | 1 if right team   | 0           | 0                               |
//! | 7    | 1 if controlled   | 0           | 0                               |
//! | 8    | tired factor      | height z    | 0                               |
//!
//! The score difference is clamped to [-1, 1].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{validate_obs, ObsError, Observation, PLAYERS_PER_TEAM};
use crate::gnn::{Adjacency, Graph, FEATURE_WIDTH};
use crate::numeric::Matrix;

pub const NODE_COUNT: usize = 2 * PLAYERS_PER_TEAM + 2;
pub const BALL_NODE: usize = 2 * PLAYERS_PER_TEAM;
pub const GLOBAL_NODE: usize = BALL_NODE + 1;

pub const SLOT_IS_BALL: usize = 4;
pub const SLOT_LEFT_TEAM: usize = 5;
pub const SLOT_RIGHT_TEAM: usize = 6;
pub const SLOT_ACTIVE: usize = 7;
pub const SLOT_EXTRA: usize = 8;

/// How edges between the 24 nodes are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EdgeRule {
    /// Complete graph with self-loops.
    #[default]
    Full,
    /// Each positional node joined to its k nearest positional nodes
    /// (Euclidean, ties by index), symmetrized; the global node is joined to
    /// every node.
    Knn(usize),
}

impl fmt::Display for EdgeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRule::Full => f.write_str("full"),
            EdgeRule::Knn(k) => write!(f, "knn:{k}"),
        }
    }
}

impl FromStr for EdgeRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "full" {
            return Ok(EdgeRule::Full);
        }
        match s.strip_prefix("knn:").map(str::parse::<usize>) {
            Some(Ok(k)) if k >= 1 => Ok(EdgeRule::Knn(k)),
            _ => Err(format!(
                "invalid edge rule `{s}` (expected `full` or `knn:<k>` with k >= 1)"
            )),
        }
    }
}

impl TryFrom<String> for EdgeRule {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<EdgeRule> for String {
    fn from(rule: EdgeRule) -> String {
        rule.to_string()
    }
}

/// Converts observations to graphs, sharing one adjacency across graphs for
/// the fully connected rule.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    rule: EdgeRule,
    full: Arc<Adjacency>,
}

impl GraphBuilder {
    pub fn new(rule: EdgeRule) -> Self {
        Self {
            rule,
            full: Arc::new(Adjacency::fully_connected(NODE_COUNT)),
        }
    }

    pub fn rule(&self) -> EdgeRule {
        self.rule
    }

    pub fn build(&self, obs: &Observation) -> Result<Graph<f64>, ObsError> {
        validate_obs(obs).map_err(ObsError::Invalid)?;
        let features = node_features(obs);
        let adjacency = match self.rule {
            EdgeRule::Full => Arc::clone(&self.full),
            EdgeRule::Knn(k) => Arc::new(knn_adjacency(&features, k)),
        };
        Ok(Graph::new(features, adjacency).expect("24 nodes on both sides"))
    }
}

/// Converts one observation with the given edge rule.
pub fn obs_to_graph(obs: &Observation, rule: EdgeRule) -> Result<Graph<f64>, ObsError> {
    GraphBuilder::new(rule).build(obs)
}

fn node_features(obs: &Observation) -> Matrix<f64> {
    let mut m = Matrix::zeros(NODE_COUNT, FEATURE_WIDTH);
    let teams = [
        (&obs.left_team, SLOT_LEFT_TEAM, 0),
        (&obs.right_team, SLOT_RIGHT_TEAM, PLAYERS_PER_TEAM),
    ];
    for (team, flag, offset) in teams {
        for (i, p) in team.iter().enumerate() {
            let row = m.row_mut(offset + i);
            row[0] = p.pos[0];
            row[1] = p.pos[1];
            row[2] = p.dir[0];
            row[3] = p.dir[1];
            row[flag] = 1.0;
            row[SLOT_EXTRA] = p.tired;
        }
    }
    m[(obs.active, SLOT_ACTIVE)] = 1.0;

    let ball = m.row_mut(BALL_NODE);
    ball[0] = obs.ball_pos[0];
    ball[1] = obs.ball_pos[1];
    ball[2] = obs.ball_dir[0];
    ball[3] = obs.ball_dir[1];
    ball[SLOT_IS_BALL] = 1.0;
    ball[SLOT_EXTRA] = obs.ball_pos[2];

    let global = m.row_mut(GLOBAL_NODE);
    let diff = f64::from(obs.score.0) - f64::from(obs.score.1);
    global[0] = (diff / 5.0).clamp(-1.0, 1.0);
    global[1] = f64::from(obs.steps_left) / 3000.0;
    global[2] = f64::from(obs.game_mode.index()) / 6.0;
    m
}

fn knn_adjacency(features: &Matrix<f64>, k: usize) -> Adjacency {
    let positional = GLOBAL_NODE;
    let mut edges = Vec::new();
    for i in 0..positional {
        let (xi, yi) = (features[(i, 0)], features[(i, 1)]);
        let mut others: Vec<(f64, usize)> = (0..positional)
            .filter(|&j| j != i)
            .map(|j| ((features[(j, 0)] - xi).hypot(features[(j, 1)] - yi), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        edges.extend(others.iter().take(k).map(|&(_, j)| (i, j)));
    }
    edges.extend((0..positional).map(|i| (i, GLOBAL_NODE)));
    Adjacency::from_edges(NODE_COUNT, &edges).expect("indices in range")
}
