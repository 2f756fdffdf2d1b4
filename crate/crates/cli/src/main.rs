mod config;

use std::cell::RefCell;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gqn_core::dqn::{
    evaluate, greedy_action, load_checkpoint, save_checkpoint, train, CheckpointError,
    CheckpointReason, ConfigError, MetricsRow, MetricsWriter, TrainError, TrainObserver,
    TrainerState,
};
use gqn_core::env::FootballEnv;
use gqn_core::gnn::NetworkKind;
use gqn_core::gradcheck::{gradcheck, GradcheckOptions};
use gqn_core::obs::{obs_to_graph, parse_obs_dump, DumpWriter};
use gqn_core::pitch::{record_episode, Pitch, Scenario};

use config::{Overrides, RunConfig};

const EXIT_CHECK: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CHECKPOINT: u8 = 3;
const EXIT_DATA: u8 = 4;

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::new(EXIT_CONFIG, e.to_string())
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        CliError::new(EXIT_CHECKPOINT, e.to_string())
    }
}

fn out_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(EXIT_CONFIG, format!("output {}: {e}", path.display()))
}

#[derive(Parser)]
#[command(
    name = "gqn",
    version,
    about = "Graph-network deep Q-learning on a toy football pitch"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an agent and write metrics and checkpoints to --out.
    Train(TrainArgs),
    /// Greedy evaluation of a checkpoint against the scripted opponents.
    Eval(EvalArgs),
    /// Finite-difference check of the network gradients.
    Gradcheck(GradcheckArgs),
    /// Compare a checkpoint's greedy actions with the actions in a dump.
    Replay(ReplayArgs),
    /// Play episodes with a checkpoint's greedy policy and write a dump.
    Record(RecordArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    net: Option<NetworkKind>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "runs/latest")]
    out: PathBuf,
    /// Resume from this checkpoint instead of a fresh network.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 10)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GradcheckArgs {
    #[arg(long, default_value = "gcn")]
    net: NetworkKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Line-delimited JSON dump.
    dump: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
}

#[derive(Args)]
struct RecordArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dump file to write.
    #[arg(long)]
    out: PathBuf,
}

struct RunOutput {
    dir: PathBuf,
    metrics: MetricsWriter<BufWriter<File>>,
}

impl RunOutput {
    fn checkpoint_path(&self, step: u64) -> PathBuf {
        self.dir.join(format!("ckpt_{step}.gqn"))
    }
}

impl TrainObserver for RunOutput {
    fn on_row(&mut self, row: &MetricsRow) -> Result<(), String> {
        self.metrics
            .write(row)
            .map_err(|e| format!("metrics.csv: {e}"))
    }

    fn on_checkpoint(
        &mut self,
        state: &TrainerState,
        _reason: CheckpointReason,
    ) -> Result<(), String> {
        let path = self.checkpoint_path(state.env_steps);
        save_checkpoint(state, &path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let overrides = Overrides {
        scenario: args.scenario,
        net: args.net,
        steps: args.steps,
        seed: args.seed,
    };
    let mut run = RunConfig::load(args.config.as_deref(), &overrides)?;
    let mut state = match &args.checkpoint {
        Some(path) => {
            let mut state = load_checkpoint(path)?;
            // the checkpoint owns the hyperparameters; only the budget can grow
            if let Some(steps) = args.steps {
                state.config.total_steps = steps;
            }
            run.trainer = state.config.clone();
            state
        }
        None => TrainerState::new(run.trainer.clone())?,
    };

    fs::create_dir_all(&args.out).map_err(|e| out_error(&args.out, e))?;
    let resolved = args.out.join("config.resolved");
    fs::write(&resolved, run.to_toml()).map_err(|e| out_error(&resolved, e))?;
    let metrics_path = args.out.join("metrics.csv");
    let resuming = args.checkpoint.is_some() && metrics_path.exists();
    let file = OpenOptions::new()
        .create(true)
        .append(resuming)
        .write(true)
        .truncate(!resuming)
        .open(&metrics_path)
        .map_err(|e| out_error(&metrics_path, e))?;
    let metrics = if resuming {
        MetricsWriter::append(BufWriter::new(file))
    } else {
        MetricsWriter::new(BufWriter::new(file)).map_err(|e| out_error(&metrics_path, e))?
    };
    let mut output = RunOutput {
        dir: args.out.clone(),
        metrics,
    };

    let mut env = FootballEnv::new(run.scenario(), run.trainer.edge_rule);
    let summary =
        train(&mut state, &mut env, &run.schedule(), &mut output).map_err(|e| match e {
            TrainError::Observer(m) => CliError::new(EXIT_CONFIG, m),
            TrainError::Config(e) => e.into(),
            other => CliError::new(EXIT_DATA, other.to_string()),
        })?;
    let final_path = args.out.join("final.gqn");
    save_checkpoint(&state, &final_path)
        .map_err(|e| CliError::new(EXIT_CONFIG, format!("{}: {e}", final_path.display())))?;

    let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| v.to_string());
    println!(
        "summary,steps={},episodes={},mean_return_last100={},eval_score_diff={}",
        state.env_steps,
        summary.episodes_finished,
        fmt(summary.recent_mean_return),
        fmt(summary.last_eval.map(|r| r.mean_score_diff)),
    );
    Ok(())
}

fn scenario(name: &str) -> Result<Scenario, CliError> {
    Scenario::by_name(name).map_err(|e| ConfigError::new("scenario", e.to_string()).into())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let scenario = scenario(&args.scenario)?;
    if args.episodes == 0 {
        return Err(ConfigError::new("episodes", "must be at least 1").into());
    }
    let state = load_checkpoint(&args.checkpoint)?;
    let mut env = FootballEnv::new(scenario, state.config.edge_rule);
    let r = evaluate(&mut env, &state.local, args.episodes, args.seed)
        .map_err(|e| CliError::new(EXIT_DATA, e.to_string()))?;
    println!(
        "episodes={} mean_score_diff={} mean_return={}",
        r.episodes, r.mean_score_diff, r.mean_return
    );
    println!(
        "eval,score_diff={},return={}",
        r.mean_score_diff, r.mean_return
    );
    Ok(())
}

fn cmd_gradcheck(args: GradcheckArgs) -> Result<(), CliError> {
    let options = GradcheckOptions {
        inject_fault: args.inject_fault,
        ..GradcheckOptions::default()
    };
    let report = gradcheck(args.net, args.seed, &options)
        .map_err(|e| CliError::new(EXIT_CHECK, e.to_string()))?;
    for p in &report.params {
        let status = if p.max_relative_error < report.tolerance {
            "ok"
        } else {
            "FAIL"
        };
        println!("{:<18} {:.3e} {status}", p.name, p.max_relative_error);
    }
    let failed: Vec<&str> = report.failures().map(|p| p.name.as_str()).collect();
    if failed.is_empty() {
        println!(
            "gradcheck {} seed {}: all parameters < {:e}",
            args.net, args.seed, report.tolerance
        );
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_CHECK,
            format!("gradient check failed for {}", failed.join(", ")),
        ))
    }
}

fn cmd_replay(args: ReplayArgs) -> Result<(), CliError> {
    let state = load_checkpoint(&args.checkpoint)?;
    let file = File::open(&args.dump)
        .map_err(|e| CliError::new(EXIT_DATA, format!("{}: {e}", args.dump.display())))?;
    let mut total = 0usize;
    let mut matched = 0usize;
    for record in parse_obs_dump(BufReader::new(file)) {
        let record = record.map_err(|e| CliError::new(EXIT_DATA, e.to_string()))?;
        let graph = obs_to_graph(&record.obs, state.config.edge_rule)
            .map_err(|e| CliError::new(EXIT_DATA, format!("record {}: {e}", total + 1)))?;
        let q = state
            .local
            .forward(&graph)
            .map_err(|e| CliError::new(EXIT_DATA, e.to_string()))?;
        let greedy = greedy_action(&q);
        let hit = greedy == record.action;
        total += 1;
        matched += usize::from(hit);
        println!(
            "record,{total},greedy={greedy},recorded={},match={hit}",
            record.action
        );
    }
    let rate = if total == 0 {
        "n/a".to_string()
    } else {
        (matched as f64 / total as f64).to_string()
    };
    println!("agreement,records={total},matched={matched},rate={rate}");
    Ok(())
}

fn cmd_record(args: RecordArgs) -> Result<(), CliError> {
    let scenario = scenario(&args.scenario)?;
    let state = load_checkpoint(&args.checkpoint)?;
    let file = File::create(&args.out).map_err(|e| out_error(&args.out, e))?;
    let mut writer = DumpWriter::new(BufWriter::new(file));
    let mut pitch = Pitch::new(scenario);
    let failure = RefCell::new(None);
    for i in 0..args.episodes {
        let seed = args.seed.wrapping_add(i as u64);
        let policy = |obs: &_| match obs_to_graph(obs, state.config.edge_rule)
            .map_err(|e| e.to_string())
            .and_then(|g| state.local.forward(&g).map_err(|e| e.to_string()))
        {
            Ok(q) => greedy_action(&q),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0
            }
        };
        let s = record_episode(&mut pitch, seed, policy, &mut writer)
            .map_err(|e| CliError::new(EXIT_DATA, e.to_string()))?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(CliError::new(EXIT_DATA, e));
        }
        println!(
            "episode,{i},seed={seed},steps={},return={},score={}-{}",
            s.steps, s.total_reward, s.score.0, s.score.1
        );
    }
    writer
        .into_inner()
        .flush()
        .map_err(|e| out_error(&args.out, e))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Record(a) => cmd_record(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
