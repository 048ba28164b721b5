use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::round::{Counters, Game, RoundLog};
use crate::config::{EvalSet, RunConfig};
use crate::envs::{POCKET, WALL_HORIZONTAL, WALL_VERTICAL};
use crate::error::{Error, Result};
use crate::eval::{evaluate, skill_goal_set, snapshot_goals, EvalReport, EvalSpec, GoalSource};
use crate::learner::Learner;
use crate::rng::{Stream, StreamRng};

/// Bumped whenever a field of `metrics.jsonl`, `evals.jsonl` or the
/// snapshot CSV changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Abandon the run after this many consecutive failed rounds.
const MAX_CONSECUTIVE_ABORTS: u32 = 10;

#[derive(Serialize)]
struct MetricsLine<'a> {
    schema_version: u32,
    #[serde(flatten)]
    log: &'a RoundLog,
}

#[derive(Serialize)]
struct AbortLine<'a> {
    schema_version: u32,
    round: u64,
    aborted: bool,
    error: &'a str,
}

#[derive(Serialize)]
struct EvalLine<'a> {
    schema_version: u32,
    #[serde(flatten)]
    report: &'a EvalReport,
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub run_dir: PathBuf,
    pub evals: Vec<EvalReport>,
    pub counters: Counters,
}

impl TrainSummary {
    /// Latest success rate on the named goal set.
    pub fn final_success(&self, set: EvalSet) -> Option<f64> {
        self.evals
            .iter()
            .rev()
            .find(|e| e.goal_set_name == set.name())
            .map(|e| e.success_rate)
    }

    /// Best success rate on the named goal set over the whole run.
    pub fn best_success(&self, set: EvalSet) -> Option<f64> {
        self.evals
            .iter()
            .filter(|e| e.goal_set_name == set.name())
            .map(|e| e.success_rate)
            .fold(None, |acc: Option<f64>, r| {
                Some(acc.map_or(r, |a| a.max(r)))
            })
    }
}

/// The per-event evaluation stream, shared with the standalone evaluator so
/// a checkpoint re-evaluated at the same round reproduces its result.
pub fn eval_rng(seed: u64, round: u64, set: EvalSet) -> StreamRng {
    StreamRng::with_index(seed, Stream::Eval, round * 8 + set.index())
}

/// Evaluation spec for one goal set under `cfg`.
pub fn eval_spec(cfg: &RunConfig, set: EvalSet) -> Result<EvalSpec> {
    let env = &cfg.env;
    let mut spec = match set {
        EvalSet::GId => EvalSpec::uniform(
            set.name(),
            env.feasible_goal_space(),
            cfg.eval.episodes,
            env.epsilon,
        ),
        EvalSet::GOod => EvalSpec::uniform(
            set.name(),
            env.ood_goal_space(),
            cfg.eval.episodes,
            env.epsilon,
        ),
        EvalSet::GOodAnnulus => EvalSpec {
            source: GoalSource::Annulus {
                outer: env.ood_goal_space(),
                inner: env.feasible_goal_space(),
            },
            ..EvalSpec::uniform(
                set.name(),
                env.ood_goal_space(),
                cfg.eval.episodes,
                env.epsilon,
            )
        },
        EvalSet::BehindObstacles => EvalSpec::list(
            set.name(),
            skill_goal_set(set.name())?,
            cfg.eval.skill_episodes,
            env.epsilon,
        ),
    };
    if env.misspecified {
        spec.policy_goal_space = Some(env.goal_space());
    }
    Ok(spec)
}

/// Runs every configured goal set against `policy`.
pub fn evaluate_sets(cfg: &RunConfig, policy: &Learner, round: u64) -> Result<Vec<EvalReport>> {
    let env = cfg.env.env();
    let reward = cfg.env.reward_spec();
    cfg.eval
        .sets
        .iter()
        .map(|&set| {
            evaluate(
                policy,
                &eval_spec(cfg, set)?,
                &env,
                &reward,
                round,
                &mut eval_rng(cfg.seed, round, set),
            )
        })
        .collect()
}

struct RunFiles {
    dir: PathBuf,
    metrics: BufWriter<File>,
    evals: BufWriter<File>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_json_line<T: Serialize>(w: &mut impl Write, value: &T, path: &Path) -> Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))
}

impl RunFiles {
    fn open(cfg: &RunConfig) -> Result<Self> {
        let dir = cfg.run_dir();
        for sub in [dir.clone(), dir.join("snapshots"), dir.join("checkpoints")] {
            fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        }
        let write = |name: &str, text: String| {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(path, e))
        };
        write("config.toml", cfg.to_toml()?)?;
        write("SCHEMA_VERSION", format!("{SCHEMA_VERSION}\n"))?;
        let meta = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "method": cfg.method.label(),
            "seed": cfg.seed,
            "goal_space": cfg.env.goal_space(),
            "g_id": cfg.env.feasible_goal_space(),
            "g_ood": cfg.env.ood_goal_space(),
            "epsilon": cfg.env.epsilon,
            "walls": [WALL_VERTICAL, WALL_HORIZONTAL],
            "pocket": POCKET,
        });
        write("meta.json", serde_json::to_string_pretty(&meta)? + "\n")?;
        Ok(Self {
            metrics: create(&dir.join("metrics.jsonl"))?,
            evals: create(&dir.join("evals.jsonl"))?,
            dir,
        })
    }

    fn round(&mut self, log: &RoundLog) -> Result<()> {
        let line = MetricsLine {
            schema_version: SCHEMA_VERSION,
            log,
        };
        write_json_line(&mut self.metrics, &line, &self.dir.join("metrics.jsonl"))
    }

    fn aborted(&mut self, round: u64, error: &str) -> Result<()> {
        let line = AbortLine {
            schema_version: SCHEMA_VERSION,
            round,
            aborted: true,
            error,
        };
        write_json_line(&mut self.metrics, &line, &self.dir.join("metrics.jsonl"))
    }

    fn eval(&mut self, report: &EvalReport) -> Result<()> {
        let line = EvalLine {
            schema_version: SCHEMA_VERSION,
            report,
        };
        write_json_line(&mut self.evals, &line, &self.dir.join("evals.jsonl"))
    }

    fn snapshot(&self, game: &Game, round: u64) -> Result<()> {
        for (name, gen) in [
            ("gen_a", game.gen_a.as_ref()),
            ("gen_b", game.gen_b.as_ref()),
        ] {
            if let Some(gen) = gen {
                let path = self
                    .dir
                    .join("snapshots")
                    .join(format!("{name}_round_{round:06}.csv"));
                snapshot_goals(gen.buffer(), gen.goal_space().dim(), round, create(&path)?)?;
            }
        }
        Ok(())
    }

    fn checkpoint(&self, game: &Game, tag: &str) -> Result<()> {
        let dir = self.dir.join("checkpoints");
        game.bob
            .to_checkpoint()
            .save(&dir.join(format!("bob_{tag}.ckpt")))?;
        if let Some(alice) = &game.alice {
            alice
                .to_checkpoint()
                .save(&dir.join(format!("alice_{tag}.ckpt")))?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        self.metrics
            .flush()
            .map_err(|e| Error::io(self.dir.join("metrics.jsonl"), e))?;
        self.evals
            .flush()
            .map_err(|e| Error::io(self.dir.join("evals.jsonl"), e))
    }
}

/// Builds the players for `cfg`.
pub fn new_game(cfg: &RunConfig) -> Result<Game> {
    Game::new(
        cfg.method.clone(),
        cfg.env.clone(),
        &cfg.learner,
        &cfg.generator,
        cfg.seed,
    )
}

/// Runs `cfg.rounds` rounds, evaluating Bob before training and after
/// every `eval.every` rounds, and writes the run directory.
pub fn train(cfg: &RunConfig) -> Result<TrainSummary> {
    cfg.validate()?;
    let mut game = new_game(cfg)?;
    let mut files = RunFiles::open(cfg)?;
    let mut evals = Vec::new();
    let mut run_evals = |game: &Game, files: &mut RunFiles, round: u64| -> Result<()> {
        for report in evaluate_sets(cfg, &game.bob, round)? {
            log::info!(
                "round {round}: {} success {:.3}",
                report.goal_set_name,
                report.success_rate
            );
            files.eval(&report)?;
            evals.push(report);
        }
        Ok(())
    };
    run_evals(&game, &mut files, 0)?;
    let mut consecutive_aborts = 0;
    for round in 1..=cfg.rounds {
        match game.play_round() {
            Ok(log) => {
                consecutive_aborts = 0;
                files.round(&log)?;
            }
            Err(e) => {
                log::error!("round {round} aborted: {e}");
                files.aborted(round, &e.to_string())?;
                consecutive_aborts += 1;
                if consecutive_aborts >= MAX_CONSECUTIVE_ABORTS {
                    files.flush()?;
                    return Err(Error::State(format!(
                        "{consecutive_aborts} consecutive rounds aborted; last error: {e}"
                    )));
                }
            }
        }
        if round % cfg.eval.every == 0 {
            run_evals(&game, &mut files, round)?;
        }
        if cfg.snapshot_every > 0 && round % cfg.snapshot_every == 0 {
            files.snapshot(&game, round)?;
        }
        if cfg.checkpoint_every > 0 && round % cfg.checkpoint_every == 0 {
            files.checkpoint(&game, &format!("round_{round:06}"))?;
        }
    }
    files.checkpoint(&game, "final")?;
    files.flush()?;
    Ok(TrainSummary {
        run_dir: files.dir,
        evals,
        counters: game.counters(),
    })
}
