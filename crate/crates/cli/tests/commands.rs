use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gqn_core::dqn::{evaluate, load_checkpoint};
use gqn_core::env::FootballEnv;
use gqn_core::pitch::Scenario;

fn gqn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gqn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn fresh_checkpoint(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("fresh");
    let o = gqn(&[
        "train",
        "--scenario",
        "easy",
        "--steps",
        "0",
        "--seed",
        "3",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.join("final.gqn")
}

#[test]
fn zero_step_train_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = gqn(&[
        "train",
        "--scenario",
        "empty_goal_1v0",
        "--net",
        "gcn",
        "--steps",
        "0",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(out.join("metrics.csv")).unwrap(),
        "step,episode,epsilon,loss,episode_return,score_diff,eval_return\n"
    );
    assert!(out.join("final.gqn").exists());
    let resolved = fs::read_to_string(out.join("config.resolved")).unwrap();
    assert!(resolved.contains("scenario = \"empty_goal_1v0\""));
    assert!(resolved.contains("total_steps = 0"));
}

#[test]
fn missing_scenario_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = gqn(&["train", "--steps", "0", "--out", p(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("scenario"), "{}", stderr(&o));

    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "scenario = \"easy\"\nbatch_size = 0\n").unwrap();
    let o = gqn(&[
        "train",
        "--config",
        p(&cfg),
        "--out",
        p(&dir.path().join("y")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("batch_size"), "{}", stderr(&o));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "scenario = \"kaggle\"\nseed = 9\ntotal_steps = 500\nlr = 0.001\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    let o = gqn(&[
        "train",
        "--config",
        p(&cfg),
        "--steps",
        "0",
        "--net",
        "gat",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let resolved = fs::read_to_string(out.join("config.resolved")).unwrap();
    for line in [
        "scenario = \"kaggle\"",
        "seed = 9",
        "total_steps = 0",
        "lr = 0.001",
        "network_kind = \"gat\"",
    ] {
        assert!(
            resolved.lines().any(|l| l == line),
            "missing `{line}` in\n{resolved}"
        );
    }
}

#[test]
fn same_seed_gives_identical_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "scenario = \"easy\"\nepisode_length = 80\nmin_buffer = 20\nbuffer_capacity = 500\ncheckpoint_interval = 200\neval_interval = 300\neval_episodes = 1\n",
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = gqn(&[
            "train",
            "--config",
            p(&cfg),
            "--steps",
            "700",
            "--seed",
            "2",
            "--out",
            p(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (fs::read(out.join("metrics.csv")).unwrap(), out)
    };
    let (a, out_a) = run("a");
    let (b, _) = run("b");
    assert_eq!(a, b);
    let ckpts: Vec<_> = fs::read_dir(&out_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("ckpt_"))
        .collect();
    assert!(!ckpts.is_empty());
}

#[test]
fn eval_is_reproducible_and_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = fresh_checkpoint(dir.path());
    let args = [
        "eval",
        "--checkpoint",
        p(&ckpt),
        "--scenario",
        "easy",
        "--episodes",
        "1",
        "--seed",
        "4",
    ];
    let a = gqn(&args);
    let b = gqn(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));

    let state = load_checkpoint(&ckpt).unwrap();
    let mut env = FootballEnv::new(Scenario::by_name("easy").unwrap(), state.config.edge_rule);
    let r = evaluate(&mut env, &state.local, 1, 4).unwrap();
    let line = format!(
        "eval,score_diff={},return={}",
        r.mean_score_diff, r.mean_return
    );
    assert!(stdout(&a).lines().any(|l| l == line), "{}", stdout(&a));
}

#[test]
fn corrupt_checkpoint_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = fresh_checkpoint(dir.path());
    let text = fs::read_to_string(&ckpt).unwrap();

    let bad = dir.path().join("bad.gqn");
    fs::write(&bad, text.replacen("GQN-CKPT 1", "GQN-CKPT 2", 1)).unwrap();
    let o = gqn(&["eval", "--checkpoint", p(&bad), "--scenario", "easy"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("header"), "{}", stderr(&o));

    fs::write(
        &bad,
        text.replacen("param layer1.weight 9 32", "param layer1.weight 3 96", 1),
    )
    .unwrap();
    let o = gqn(&["eval", "--checkpoint", p(&bad), "--scenario", "easy"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("shape"), "{}", stderr(&o));
}

#[test]
fn gradcheck_passes_and_fault_fails() {
    for net in ["gcn", "gat"] {
        let o = gqn(&["gradcheck", "--net", net, "--seed", "11"]);
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    }
    let o = gqn(&[
        "gradcheck",
        "--net",
        "gat",
        "--seed",
        "11",
        "--inject-fault",
        "layer2.att_dst",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("layer2.att_dst"), "{}", stderr(&o));
}

#[test]
fn replay_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = fresh_checkpoint(dir.path());

    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let o = gqn(&["replay", p(&empty), "--checkpoint", p(&ckpt)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("agreement,records=0,"));

    let dump = dir.path().join("greedy.jsonl");
    let o = gqn(&[
        "record",
        "--checkpoint",
        p(&ckpt),
        "--scenario",
        "easy",
        "--seed",
        "1",
        "--out",
        p(&dump),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = gqn(&["replay", p(&dump), "--checkpoint", p(&ckpt)]);
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert!(last.ends_with(",rate=1"), "{last}");

    let text = fs::read_to_string(&dump).unwrap();
    let mut lines: Vec<&str> = text.lines().take(4).collect();
    lines[2] = "{\"ball\": [0, 0]";
    let broken = dir.path().join("broken.jsonl");
    fs::write(&broken, lines.join("\n")).unwrap();
    let o = gqn(&["replay", p(&broken), "--checkpoint", p(&ckpt)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn resume_continues_the_metrics_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "scenario = \"easy\"\nepisode_length = 80\nmin_buffer = 20\nbuffer_capacity = 400\ncheckpoint_interval = 300\n",
    )
    .unwrap();
    let full = dir.path().join("full");
    let o = gqn(&[
        "train",
        "--config",
        p(&cfg),
        "--steps",
        "900",
        "--out",
        p(&full),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut ckpt = fs::read_dir(&full)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_str()
                .unwrap()
                .starts_with("ckpt_")
        })
        .collect::<Vec<_>>();
    ckpt.sort();
    let first = &ckpt[0];
    let step: u64 = first.file_stem().unwrap().to_str().unwrap()[5..]
        .parse()
        .unwrap();

    let resumed = dir.path().join("resumed");
    let o = gqn(&[
        "train",
        "--config",
        p(&cfg),
        "--steps",
        "900",
        "--checkpoint",
        p(first),
        "--out",
        p(&resumed),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let full_rows = fs::read_to_string(full.join("metrics.csv")).unwrap();
    let tail: Vec<&str> = full_rows
        .lines()
        .skip(1)
        .filter(|l| l.split(',').next().unwrap().parse::<u64>().unwrap() > step)
        .collect();
    let resumed_rows = fs::read_to_string(resumed.join("metrics.csv")).unwrap();
    let resumed_tail: Vec<&str> = resumed_rows.lines().skip(1).collect();
    assert!(!tail.is_empty());
    assert_eq!(resumed_tail, tail);
}
