use std::fs;
use std::path::Path;

use cusp_core::autodiff::Checkpoint;
use cusp_core::config::{EvalSet, PartialRunConfig, RunConfig};
use cusp_core::eval::read_snapshot;
use cusp_core::game::{evaluate_sets, train, MethodKind, MethodSpec, SCHEMA_VERSION};
use cusp_core::learner::Learner;
use cusp_core::rng::{Stream, StreamRng};

fn quick(method: MethodSpec, rounds: u64, seed: u64, out: &Path) -> RunConfig {
    let mut cfg = RunConfig::new(method, rounds, seed, out);
    cfg.learner.hidden_dim = 8;
    cfg.learner.batch_size = 16;
    cfg.learner.buffer_capacity = 5_000;
    cfg.generator.sac.hidden_dim = 8;
    cfg.generator.sac.batch_size = 8;
    cfg.generator.updates_per_round = 2;
    cfg.env.her_k = 1;
    cfg.eval.episodes = 4;
    cfg.eval.skill_episodes = 2;
    cfg
}

fn lines(path: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn eval_schedule_includes_round_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(
        MethodSpec::new(MethodKind::DomainRandomization),
        1000,
        1,
        dir.path(),
    );
    cfg.eval.sets = vec![EvalSet::GId];
    let summary = train(&cfg).unwrap();
    let rounds: Vec<u64> = summary.evals.iter().map(|e| e.round).collect();
    assert_eq!(rounds, (0..=10).map(|i| i * 100).collect::<Vec<_>>());

    let run = cfg.run_dir();
    let evals = lines(&run.join("evals.jsonl"));
    assert_eq!(evals.len(), 11);
    for e in &evals {
        assert_eq!(e["schema_version"], SCHEMA_VERSION);
        assert_eq!(e["goal_set_name"], "g_id");
        assert_eq!(e["per_goal"].as_array().unwrap().len(), 4);
    }
    let metrics = lines(&run.join("metrics.jsonl"));
    assert_eq!(metrics.len(), 1000);
    assert!(metrics
        .iter()
        .enumerate()
        .all(|(i, m)| m["round"] == i as u64 + 1 && m["schema_version"] == SCHEMA_VERSION));
    assert_eq!(
        fs::read_to_string(run.join("SCHEMA_VERSION"))
            .unwrap()
            .trim(),
        "1"
    );
}

#[test]
fn snapshots_follow_their_cadence() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(MethodSpec::cusp(), 12, 2, dir.path());
    cfg.snapshot_every = 4;
    cfg.eval.every = 6;
    train(&cfg).unwrap();
    let snaps = cfg.run_dir().join("snapshots");
    let mut names: Vec<String> = fs::read_dir(&snaps)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let expected: Vec<String> = ["gen_a", "gen_b"]
        .iter()
        .flat_map(|g| [4, 8, 12].map(|r| format!("{g}_round_{r:06}.csv")))
        .collect();
    assert_eq!(names, expected);
    for r in [4u64, 8, 12] {
        let rows =
            read_snapshot(fs::File::open(snaps.join(format!("gen_a_round_{r:06}.csv"))).unwrap())
                .unwrap();
        // Two records per round with history kept.
        assert_eq!(rows.len() as u64, 2 * r);
        assert!(rows
            .iter()
            .all(|row| row.round == r && row.round_proposed <= r));
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, seed| {
        let cfg = quick(MethodSpec::cusp(), 15, seed, &dir.path().join(sub));
        train(&cfg).unwrap();
        let d = cfg.run_dir();
        (
            fs::read(d.join("metrics.jsonl")).unwrap(),
            fs::read(d.join("evals.jsonl")).unwrap(),
        )
    };
    let a = run("a", 3);
    let b = run("b", 3);
    let c = run("c", 4);
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}

#[test]
fn final_checkpoint_reproduces_the_last_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(
        MethodSpec::new(MethodKind::DomainRandomization),
        30,
        5,
        dir.path(),
    );
    cfg.eval.every = 30;
    let summary = train(&cfg).unwrap();
    let ck = Checkpoint::load(&cfg.run_dir().join("checkpoints/bob_final.ckpt")).unwrap();
    let bob =
        Learner::from_checkpoint(&ck, cfg.learner.clone(), StreamRng::new(0, Stream::Bob)).unwrap();
    let again = evaluate_sets(&cfg, &bob, 30).unwrap();
    let logged: Vec<_> = summary
        .evals
        .iter()
        .filter(|e| e.round == 30)
        .cloned()
        .collect();
    assert_eq!(again, logged);
    assert!(!cfg.run_dir().join("checkpoints/alice_final.ckpt").exists());
}

#[test]
fn written_config_resolves_to_the_same_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(MethodSpec::paired_ablation(), 2, 6, dir.path());
    cfg.env.misspecified = true;
    train(&cfg).unwrap();
    let back = PartialRunConfig::load(&cfg.run_dir().join("config.toml"))
        .unwrap()
        .resolve()
        .unwrap();
    assert_eq!(back, cfg);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.run_dir().join("meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["goal_space"]["low"].as_array().unwrap().len(), 3);
    assert_eq!(meta["g_id"]["low"].as_array().unwrap().len(), 2);
}

#[test]
fn misspecified_evaluation_scores_feasible_dims() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(
        MethodSpec::new(MethodKind::DomainRandomization),
        3,
        7,
        dir.path(),
    );
    cfg.env.misspecified = true;
    let summary = train(&cfg).unwrap();
    for e in &summary.evals {
        for g in &e.per_goal {
            assert_eq!(g.goal.len(), 3);
            assert!((-1.0..=1.0).contains(&g.goal[2]), "{:?}", g.goal);
            assert_eq!(g.success, g.final_distance < cfg.env.epsilon);
        }
    }
}

#[test]
fn invalid_schedule_is_rejected_before_any_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(MethodSpec::cusp(), 3, 8, dir.path());
    cfg.eval.every = 0;
    assert!(matches!(train(&cfg), Err(cusp_core::Error::Config(_))));
    assert!(!cfg.run_dir().exists());
}
