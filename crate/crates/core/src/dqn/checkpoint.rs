//! Plain-text trainer snapshots.
//!
//! ```text
//! GQN-CKPT 1
//! [config] <n>          n lines of TOML follow
//! [network local gcn]
//! param <name> <rows> <cols>
//! <row-major values>
//! …
//! [network target gcn]
//! [adam] <t>
//! m <name> <rows> <cols> / v …
//! [counters] env_steps episodes learn_steps epsilon
//! [rng] <name> <seed> <stream> <word_pos>
//! [replay] <capacity> <pushed> <adjacencies> <graphs> <transitions>
//! adj <n> <row-major 0/1 mask>
//! graph <adj> <rows> <cols>
//! <values>
//! t <state> <action> <reward> <next> <done>
//! [end]
//! ```
//!
//! Parameters and moments use 17 significant digits; replay values use the
//! shortest exact representation. Both parse back bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::gnn::{Adjacency, Graph, NetworkKind, QNetwork};
use crate::numeric::{AdamState, Matrix, ParamSet, RngSnapshot, RngStream};

use super::config::TrainerConfig;
use super::replay::{ReplayBuffer, Transition};
use super::trainer::TrainerState;

pub const CHECKPOINT_MAGIC: &str = "GQN-CKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("unsupported checkpoint header `{found}` (expected `{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}`)")]
    Version { found: String },
    #[error("checkpoint truncated: expected {expected}")]
    Truncated { expected: String },
    #[error("checkpoint shape mismatch: {0}")]
    Shape(String),
    #[error("checkpoint line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("checkpoint io: {0}")]
    Io(#[from] io::Error),
}

fn write_values(out: &mut String, values: &[f64], exact_short: bool) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if exact_short {
            write!(out, "{v:e}").expect("write to string");
        } else {
            write!(out, "{v:.16e}").expect("write to string");
        }
    }
    out.push('\n');
}

fn write_params(out: &mut String, tag: &str, params: &ParamSet<f64>) {
    for p in params.iter() {
        writeln!(
            out,
            "{tag} {} {} {}",
            p.name,
            p.value.rows(),
            p.value.cols()
        )
        .expect("write to string");
        write_values(out, p.value.as_slice(), false);
    }
}

pub fn checkpoint_to_string(state: &TrainerState) -> String {
    let mut out = String::new();
    writeln!(out, "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}").unwrap();
    let config = state.config.to_toml();
    let lines: Vec<&str> = config.lines().collect();
    writeln!(out, "[config] {}", lines.len()).unwrap();
    for l in lines {
        writeln!(out, "{l}").unwrap();
    }
    for (role, net) in [("local", &state.local), ("target", &state.target)] {
        writeln!(out, "[network {role} {}]", net.kind()).unwrap();
        write_params(&mut out, "param", net.params());
    }
    writeln!(out, "[adam] {}", state.optimizer.t).unwrap();
    for (p, (m, v)) in state
        .local
        .params()
        .iter()
        .zip(state.optimizer.m.iter().zip(&state.optimizer.v))
    {
        writeln!(out, "m {} {} {}", p.name, m.rows(), m.cols()).unwrap();
        write_values(&mut out, m.as_slice(), false);
        writeln!(out, "v {} {} {}", p.name, v.rows(), v.cols()).unwrap();
        write_values(&mut out, v.as_slice(), false);
    }
    writeln!(
        out,
        "[counters] {} {} {} {:.16e}",
        state.env_steps, state.episodes, state.learn_steps, state.epsilon
    )
    .unwrap();
    for (name, rng) in [("action", &state.action_rng), ("replay", &state.replay_rng)] {
        let s = rng.snapshot();
        writeln!(out, "[rng] {name} {} {} {}", s.seed, s.stream, s.word_pos).unwrap();
    }
    write_replay(&mut out, &state.buffer);
    out.push_str("[end]\n");
    out
}

fn write_replay(out: &mut String, buffer: &ReplayBuffer) {
    let mut adj_ids: HashMap<*const Adjacency, usize> = HashMap::new();
    let mut adjs: Vec<&Adjacency> = Vec::new();
    let mut graph_ids: HashMap<*const Graph<f64>, usize> = HashMap::new();
    let mut graphs: Vec<(&Graph<f64>, usize)> = Vec::new();
    let mut rows: Vec<(usize, &Transition, usize)> = Vec::with_capacity(buffer.len());
    for t in buffer.iter() {
        let mut ids = [0usize; 2];
        for (slot, g) in [&t.state, &t.next_state].into_iter().enumerate() {
            ids[slot] = *graph_ids.entry(Arc::as_ptr(g)).or_insert_with(|| {
                let a = Arc::as_ptr(g.shared_adjacency());
                let aid = *adj_ids.entry(a).or_insert_with(|| {
                    adjs.push(g.adjacency());
                    adjs.len() - 1
                });
                graphs.push((g.as_ref(), aid));
                graphs.len() - 1
            });
        }
        rows.push((ids[0], t, ids[1]));
    }
    writeln!(
        out,
        "[replay] {} {} {} {} {}",
        buffer.capacity(),
        buffer.pushed(),
        adjs.len(),
        graphs.len(),
        rows.len()
    )
    .unwrap();
    for a in &adjs {
        let bits: String = a
            .mask()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        writeln!(out, "adj {} {bits}", a.node_count()).unwrap();
    }
    for (g, aid) in &graphs {
        let f = g.features();
        writeln!(out, "graph {aid} {} {}", f.rows(), f.cols()).unwrap();
        write_values(out, f.as_slice(), true);
    }
    for (s, t, n) in rows {
        writeln!(
            out,
            "t {s} {} {:e} {n} {}",
            t.action,
            t.reward,
            u8::from(t.done)
        )
        .unwrap();
    }
}

/// Writes to a temporary sibling and renames, so a crash never leaves a
/// half-written checkpoint under the final name.
pub fn save_checkpoint(state: &TrainerState, path: &Path) -> Result<(), CheckpointError> {
    let text = checkpoint_to_string(state);
    let tmp = path.with_extension("gqn.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<TrainerState, CheckpointError> {
    let text = fs::read_to_string(path)?;
    checkpoint_from_str(&text)
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, expected: &str) -> Result<&'a str, CheckpointError> {
        match self.iter.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(CheckpointError::Truncated {
                expected: expected.to_string(),
            }),
        }
    }

    fn malformed(&self, message: impl Into<String>) -> CheckpointError {
        CheckpointError::Malformed {
            line: self.line,
            message: message.into(),
        }
    }

    /// Next line, split on whitespace, with its leading tag checked.
    fn tagged(&mut self, tag: &str) -> Result<Vec<&'a str>, CheckpointError> {
        let l = self.next(tag)?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.first() != Some(&tag) {
            return Err(self.malformed(format!("expected `{tag}`, found `{l}`")));
        }
        Ok(parts[1..].to_vec())
    }

    fn num<T: std::str::FromStr>(
        &self,
        s: Option<&&str>,
        what: &str,
    ) -> Result<T, CheckpointError> {
        s.and_then(|s| s.parse().ok())
            .ok_or_else(|| self.malformed(format!("bad or missing {what}")))
    }

    fn values(&mut self, count: usize, what: &str) -> Result<Vec<f64>, CheckpointError> {
        let l = self.next(what)?;
        let vals = l
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| self.malformed(format!("{what}: {e}")))?;
        if vals.len() != count {
            return Err(self.malformed(format!(
                "{what}: expected {count} values, found {}",
                vals.len()
            )));
        }
        Ok(vals)
    }

    /// `<tag> <name> <rows> <cols>` then a value line.
    fn matrix(&mut self, tag: &str) -> Result<(String, Matrix<f64>), CheckpointError> {
        let h = self.tagged(tag)?;
        let name = h
            .first()
            .ok_or_else(|| self.malformed("missing name"))?
            .to_string();
        let rows: usize = self.num(h.get(1), "rows")?;
        let cols: usize = self.num(h.get(2), "cols")?;
        let vals = self.values(rows * cols, &name)?;
        Ok((
            name,
            Matrix::from_vec(rows, cols, vals).expect("count checked"),
        ))
    }
}

fn read_network(
    lines: &mut Lines<'_>,
    role: &str,
    kind: NetworkKind,
) -> Result<QNetwork<f64>, CheckpointError> {
    let header = lines.next("network section")?;
    let expected = format!("[network {role} {kind}]");
    if header != expected {
        return Err(lines.malformed(format!("expected `{expected}`, found `{header}`")));
    }
    let layout = QNetwork::<f64>::zeros(kind);
    let mut params = ParamSet::new();
    for spec in layout.params().iter() {
        let (name, m) = lines.matrix("param")?;
        if name != spec.name || m.shape() != spec.value.shape() {
            return Err(CheckpointError::Shape(format!(
                "{role} parameter `{name}` is {}x{}, expected `{}` {}x{}",
                m.rows(),
                m.cols(),
                spec.name,
                spec.value.rows(),
                spec.value.cols()
            )));
        }
        params
            .add(name, m)
            .map_err(|e| lines.malformed(e.to_string()))?;
    }
    QNetwork::from_params(kind, params).map_err(CheckpointError::Shape)
}

pub fn checkpoint_from_str(text: &str) -> Result<TrainerState, CheckpointError> {
    let mut lines = Lines {
        iter: text.lines().enumerate(),
        line: 0,
    };
    let header = lines.next("header")?;
    if header != format!("{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}") {
        return Err(CheckpointError::Version {
            found: header.chars().take(40).collect(),
        });
    }

    let h = lines.tagged("[config]")?;
    let n: usize = lines.num(h.first(), "config line count")?;
    let mut toml_text = String::new();
    for _ in 0..n {
        toml_text.push_str(lines.next("config")?);
        toml_text.push('\n');
    }
    let config =
        TrainerConfig::from_toml(&toml_text).map_err(|e| lines.malformed(e.to_string()))?;
    config
        .validate()
        .map_err(|e| lines.malformed(e.to_string()))?;
    let kind = config.network_kind;

    let local = read_network(&mut lines, "local", kind)?;
    let target = read_network(&mut lines, "target", kind)?;

    let h = lines.tagged("[adam]")?;
    let t: u64 = lines.num(h.first(), "adam step")?;
    let mut optimizer = AdamState::for_params(local.params());
    optimizer.t = t;
    for (i, p) in local.params().iter().enumerate() {
        for tag in ["m", "v"] {
            let (name, m) = lines.matrix(tag)?;
            if name != p.name || m.shape() != p.value.shape() {
                return Err(CheckpointError::Shape(format!(
                    "adam `{tag}` for `{name}` does not match `{}`",
                    p.name
                )));
            }
            if tag == "m" {
                optimizer.m[i] = m;
            } else {
                optimizer.v[i] = m;
            }
        }
    }

    let c = lines.tagged("[counters]")?;
    let env_steps: u64 = lines.num(c.first(), "env_steps")?;
    let episodes: u64 = lines.num(c.get(1), "episodes")?;
    let learn_steps: u64 = lines.num(c.get(2), "learn_steps")?;
    let epsilon: f64 = lines.num(c.get(3), "epsilon")?;

    let mut rngs = Vec::new();
    for name in ["action", "replay"] {
        let r = lines.tagged("[rng]")?;
        if r.first() != Some(&name) {
            return Err(lines.malformed(format!("expected rng `{name}`")));
        }
        rngs.push(RngStream::restore(RngSnapshot {
            seed: lines.num(r.get(1), "rng seed")?,
            stream: lines.num(r.get(2), "rng stream")?,
            word_pos: lines.num(r.get(3), "rng position")?,
        }));
    }
    let replay_rng = rngs.pop().expect("two streams");
    let action_rng = rngs.pop().expect("two streams");

    let buffer = read_replay(&mut lines)?;
    if buffer.capacity() != config.buffer_capacity {
        return Err(CheckpointError::Shape(format!(
            "replay capacity {} differs from config {}",
            buffer.capacity(),
            config.buffer_capacity
        )));
    }
    let end = lines.next("[end]")?;
    if end != "[end]" {
        return Err(lines.malformed(format!("expected `[end]`, found `{end}`")));
    }

    Ok(TrainerState {
        config,
        local,
        target,
        optimizer,
        buffer,
        env_steps,
        episodes,
        learn_steps,
        epsilon,
        action_rng,
        replay_rng,
    })
}

fn read_replay(lines: &mut Lines<'_>) -> Result<ReplayBuffer, CheckpointError> {
    let h = lines.tagged("[replay]")?;
    let capacity: usize = lines.num(h.first(), "capacity")?;
    let pushed: u64 = lines.num(h.get(1), "pushed")?;
    let n_adj: usize = lines.num(h.get(2), "adjacency count")?;
    let n_graph: usize = lines.num(h.get(3), "graph count")?;
    let n_t: usize = lines.num(h.get(4), "transition count")?;
    if capacity == 0 || n_t > capacity {
        return Err(lines.malformed("replay contents exceed capacity"));
    }

    let mut adjs = Vec::with_capacity(n_adj);
    for _ in 0..n_adj {
        let a = lines.tagged("adj")?;
        let n: usize = lines.num(a.first(), "node count")?;
        let bits = a.get(1).copied().unwrap_or("");
        if bits.len() != n * n {
            return Err(lines.malformed(format!(
                "adjacency mask has {} entries, expected {}",
                bits.len(),
                n * n
            )));
        }
        let mask = bits.chars().map(|c| c == '1').collect();
        let adj = Adjacency::from_mask(n, mask).map_err(|e| lines.malformed(e.to_string()))?;
        adjs.push(Arc::new(adj));
    }
    let mut graphs = Vec::with_capacity(n_graph);
    for _ in 0..n_graph {
        let g = lines.tagged("graph")?;
        let aid: usize = lines.num(g.first(), "adjacency index")?;
        let rows: usize = lines.num(g.get(1), "rows")?;
        let cols: usize = lines.num(g.get(2), "cols")?;
        let adj = adjs
            .get(aid)
            .cloned()
            .ok_or_else(|| lines.malformed(format!("adjacency {aid} out of range")))?;
        let vals = lines.values(rows * cols, "graph features")?;
        let features = Matrix::from_vec(rows, cols, vals).expect("count checked");
        let graph = Graph::new(features, adj).map_err(|e| CheckpointError::Shape(e.to_string()))?;
        graphs.push(Arc::new(graph));
    }
    let mut items = Vec::with_capacity(n_t);
    for _ in 0..n_t {
        let t = lines.tagged("t")?;
        let s: usize = lines.num(t.first(), "state index")?;
        let action: usize = lines.num(t.get(1), "action")?;
        let reward: f64 = lines.num(t.get(2), "reward")?;
        let n: usize = lines.num(t.get(3), "next-state index")?;
        let done: u8 = lines.num(t.get(4), "done flag")?;
        let get = |i: usize| graphs.get(i).cloned();
        let (Some(state), Some(next)) = (get(s), get(n)) else {
            return Err(lines.malformed("graph index out of range"));
        };
        let tr = Transition::new(state, action, reward, next, done == 1)
            .map_err(|e| lines.malformed(e.to_string()))?;
        items.push(tr);
    }
    Ok(ReplayBuffer::from_parts(capacity, items, pushed))
}
