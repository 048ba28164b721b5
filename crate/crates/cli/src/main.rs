//! `cusp` command-line entry point.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
//! Every flag can also be set through a `CUSP_`-prefixed environment
//! variable (`CUSP_SEED`, `CUSP_ROUNDS`, ...).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use cusp_core::autodiff::Checkpoint;
use cusp_core::bench::{run_bench, BenchConfig, BenchOptimizer, BenchVariant};
use cusp_core::config::{EvalSet, PartialMethod, PartialRunConfig, RunConfig};
use cusp_core::eval::{evaluate, EvalSpec};
use cusp_core::game::{eval_rng, eval_spec, train, Ablations, MethodKind};
use cusp_core::learner::Learner;
use cusp_core::rng::{Stream, StreamRng};

#[derive(Parser, Debug)]
#[command(
    name = "cusp",
    version,
    about = "Curriculum self play on a point-mass world"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one method for one seed and write a run directory.
    Train(TrainArgs),
    /// Run a proposal process on the synthetic regret landscape.
    BenchLandscape(BenchArgs),
    /// Evaluate a saved Bob checkpoint.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, env = "CUSP_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "CUSP_SEED")]
    seed: Option<u64>,
    /// Output root; the run goes to <out>/run-<seed>.
    #[arg(long, env = "CUSP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "CUSP_PAPER_HPARAMS")]
    paper_hparams: bool,
    #[arg(long, env = "CUSP_ROUNDS")]
    rounds: Option<u64>,
    /// cusp, domain_randomization (dr), paired_single, single_learner,
    /// asp_sparse or asp_dense.
    #[arg(long, env = "CUSP_METHOD")]
    method: Option<String>,
    /// Comma-separated: no_buffer, alpha_zero, no_symmetrize, beta=<x>,
    /// refresh_start=<round>.
    #[arg(long, env = "CUSP_ABLATE")]
    ablate: Option<String>,
    /// Append one impossible goal dimension.
    #[arg(long, env = "CUSP_MISSPECIFIED")]
    misspecified: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, env = "CUSP_VARIANT", default_value = "stationary")]
    variant: String,
    #[arg(long, env = "CUSP_OPTIMIZER", default_value = "sac")]
    optimizer: String,
    #[arg(long, env = "CUSP_STEPS", default_value_t = 5000)]
    steps: u64,
    #[arg(long, env = "CUSP_SEED", default_value_t = 0)]
    seed: u64,
    /// Writes <out>/bench-<variant>-<optimizer>-<seed>/{proposals.csv,summary.json}.
    #[arg(long, env = "CUSP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, env = "CUSP_CHECKPOINT")]
    checkpoint: PathBuf,
    /// Run configuration; defaults to config.toml of the checkpoint's run.
    #[arg(long, env = "CUSP_CONFIG")]
    config: Option<PathBuf>,
    /// g_id, g_ood, g_ood_annulus or behind_obstacles.
    #[arg(long, env = "CUSP_GOAL_SET", default_value = "g_id")]
    goal_set: String,
    /// Explicit goals `x,y;x,y;...`, overriding --goal-set.
    #[arg(long)]
    goals: Option<String>,
    #[arg(long, env = "CUSP_EPISODES")]
    episodes: Option<usize>,
    #[arg(long, env = "CUSP_SEED")]
    seed: Option<u64>,
    /// Evaluation round index; selects the same goal stream as training.
    #[arg(long, env = "CUSP_ROUND", default_value_t = 0)]
    round: u64,
    /// Append the report as a JSON line to this file.
    #[arg(long)]
    log: Option<PathBuf>,
}

/// Configuration problems exit with 2, everything else with 1.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<cusp_core::Error> for Failure {
    fn from(e: cusp_core::Error) -> Self {
        match e {
            cusp_core::Error::Config(_) => Failure::Usage(e.into()),
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::BenchLandscape(args) => cmd_bench(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn resolve_train_config(args: &TrainArgs) -> Result<RunConfig, Failure> {
    let mut partial = match &args.config {
        Some(path) => PartialRunConfig::load(path)?,
        None => PartialRunConfig::default(),
    };
    if let Some(method) = &args.method {
        let kind: MethodKind = method.parse()?;
        partial
            .method
            .get_or_insert_with(PartialMethod::default)
            .kind = Some(kind);
    }
    if let Some(list) = &args.ablate {
        partial
            .method
            .get_or_insert_with(PartialMethod::default)
            .ablations = Some(Ablations::parse_list(list)?);
    }
    if let Some(seed) = args.seed {
        partial.seed = Some(seed);
    }
    if let Some(out) = &args.out {
        partial.out_dir = Some(out.clone());
    }
    if let Some(rounds) = args.rounds {
        partial.rounds = Some(rounds);
    }
    if args.paper_hparams {
        partial.paper_hparams = Some(true);
    }
    if args.misspecified {
        partial
            .env
            .get_or_insert_with(Default::default)
            .misspecified = true;
    }
    Ok(partial.resolve()?)
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let cfg = resolve_train_config(&args)?;
    log::info!(
        "training {} for {} rounds, seed {}",
        cfg.method.label(),
        cfg.rounds,
        cfg.seed
    );
    let summary = train(&cfg)?;
    for set in &cfg.eval.sets {
        if let Some(rate) = summary.final_success(*set) {
            println!("{} final success {rate:.3}", set.name());
        }
    }
    println!("run directory: {}", summary.run_dir.display());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let variant: BenchVariant = args.variant.parse()?;
    let optimizer: BenchOptimizer = args.optimizer.parse()?;
    let cfg = BenchConfig::new(variant, optimizer, args.steps, args.seed);
    let trace = run_bench(&cfg)?;
    let peak = cfg.landscape().center(0);
    let summary = serde_json::json!({
        "variant": variant.to_string(),
        "optimizer": optimizer.to_string(),
        "steps": args.steps,
        "seed": args.seed,
        "final_500_within_0.1_of_initial_center": trace.fraction_within(500, peak, 0.1),
        "final_100_mean_distance_to_center": trace.mean_distance_to_center(100),
    });
    println!("{summary}");
    if let Some(out) = args.out {
        let dir = out.join(format!("bench-{variant}-{optimizer}-{}", args.seed));
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let csv = fs::File::create(dir.join("proposals.csv")).context("creating proposals.csv")?;
        trace.write_csv(csv)?;
        fs::write(dir.join("summary.json"), format!("{summary:#}\n"))
            .context("writing summary.json")?;
        fs::write(dir.join("config.toml"), toml_string(&cfg)?).context("writing config.toml")?;
    }
    Ok(())
}

fn toml_string(cfg: &BenchConfig) -> anyhow::Result<String> {
    toml::to_string(cfg).map_err(|e| anyhow!("cannot serialize bench config: {e}"))
}

/// `x,y;x,y` into goal vectors.
fn parse_goals(text: &str) -> Result<Vec<Vec<f64>>, Failure> {
    text.split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|g| {
            g.split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Usage(anyhow!("bad goal '{g}': {e}")))
        })
        .collect()
}

fn run_config_near(checkpoint: &Path) -> Option<PathBuf> {
    let candidate = checkpoint.parent()?.parent()?.join("config.toml");
    candidate.exists().then_some(candidate)
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let ck = Checkpoint::load(&args.checkpoint).map_err(|e| {
        Failure::Runtime(anyhow!(
            "cannot load checkpoint {}: {e}",
            args.checkpoint.display()
        ))
    })?;
    let config_path = args
        .config
        .clone()
        .or_else(|| run_config_near(&args.checkpoint));
    let mut cfg = match config_path {
        Some(path) => PartialRunConfig::load(&path)?.resolve()?,
        None => RunConfig::new(cusp_core::game::MethodSpec::cusp(), 0, 0, "."),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.episodes {
        cfg.eval.episodes = n;
        cfg.eval.skill_episodes = n;
    }
    let set = EvalSet::parse(&args.goal_set)?;
    let mut spec: EvalSpec = eval_spec(&cfg, set)?;
    if let Some(text) = &args.goals {
        let goals = parse_goals(text)?;
        spec = EvalSpec {
            policy_goal_space: spec.policy_goal_space,
            ..EvalSpec::list(
                "explicit",
                goals,
                args.episodes.unwrap_or(1),
                cfg.env.epsilon,
            )
        };
    }
    let policy = Learner::from_checkpoint(
        &ck,
        cfg.learner.clone(),
        StreamRng::new(cfg.seed, Stream::Bob),
    )?;
    let report = evaluate(
        &policy,
        &spec,
        &cfg.env.env(),
        &cfg.env.reward_spec(),
        args.round,
        &mut eval_rng(cfg.seed, args.round, set),
    )?;
    let line = serde_json::to_string(&report).context("serializing report")?;
    println!(
        "{} success rate {:.3} ({} / {})",
        report.goal_set_name,
        report.success_rate,
        report.successes(),
        report.n_episodes
    );
    if let Some(path) = args.log {
        use std::io::Write;
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .with_context(|| format!("opening {}", path.display()))?;
        writeln!(f, "{line}").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
