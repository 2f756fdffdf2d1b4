use std::fmt::Write as _;
use std::io::{self, Write};

pub const METRICS_HEADER: &str = "step,episode,epsilon,loss,episode_return,score_diff,eval_return";

/// One line of the metrics log. Episode rows leave `eval_return` blank;
/// evaluation rows fill only `score_diff` and `eval_return`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: u64,
    pub episode: u64,
    pub epsilon: f64,
    pub loss: Option<f64>,
    pub episode_return: Option<f64>,
    pub score_diff: Option<f64>,
    pub eval_return: Option<f64>,
}

impl MetricsRow {
    pub fn is_eval(&self) -> bool {
        self.eval_return.is_some()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{},{},{}", self.step, self.episode, self.epsilon);
        for v in [
            self.loss,
            self.episode_return,
            self.score_diff,
            self.eval_return,
        ] {
            s.push(',');
            if let Some(v) = v {
                write!(s, "{v}").expect("write to string");
            }
        }
        s
    }
}

/// Append-only CSV writer; every row is flushed as soon as it is written.
pub struct MetricsWriter<W: Write> {
    out: W,
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{METRICS_HEADER}")?;
        out.flush()?;
        Ok(Self { out })
    }

    /// Continues an existing log without writing the header again.
    pub fn append(out: W) -> Self {
        Self { out }
    }

    pub fn write(&mut self, row: &MetricsRow) -> io::Result<()> {
        writeln!(self.out, "{}", row.to_csv())?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
