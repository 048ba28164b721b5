//! Run configuration: TOML file, command-line overrides, validation.
//!
//! Every section is optional except `method.kind` and `rounds`; unset keys
//! take desk defaults. The resolved configuration is written verbatim into
//! the run directory before training starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Ablations, EnvSpec, MethodKind, MethodSpec};
use crate::goalgen::GeneratorConfig;
use crate::learner::SacConfig;

/// Evaluation goal sets run at every evaluation event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalSet {
    /// Uniform over the feasible in-distribution box.
    GId,
    /// Uniform over the full out-of-distribution box.
    GOod,
    /// Uniform over the out-of-distribution box minus the training box.
    GOodAnnulus,
    BehindObstacles,
}

impl EvalSet {
    pub fn name(self) -> &'static str {
        match self {
            EvalSet::GId => "g_id",
            EvalSet::GOod => "g_ood",
            EvalSet::GOodAnnulus => "g_ood_annulus",
            EvalSet::BehindObstacles => "behind_obstacles",
        }
    }

    pub fn index(self) -> u64 {
        match self {
            EvalSet::GId => 0,
            EvalSet::GOod => 1,
            EvalSet::GOodAnnulus => 2,
            EvalSet::BehindObstacles => 3,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            EvalSet::GId,
            EvalSet::GOod,
            EvalSet::GOodAnnulus,
            EvalSet::BehindObstacles,
        ]
        .into_iter()
        .find(|e| e.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown eval set '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSchedule {
    /// Evaluate after every this many rounds (and once before training).
    pub every: u64,
    /// Episodes for the uniform goal sets.
    pub episodes: usize,
    /// Episodes for fixed skill goal lists.
    pub skill_episodes: usize,
    pub sets: Vec<EvalSet>,
}

impl Default for EvalSchedule {
    fn default() -> Self {
        Self {
            every: 100,
            episodes: 50,
            skill_episodes: 5,
            sets: vec![EvalSet::GId, EvalSet::GOod, EvalSet::BehindObstacles],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub method: MethodSpec,
    pub rounds: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub paper_hparams: bool,
    /// Generator snapshot cadence in rounds; 0 disables.
    pub snapshot_every: u64,
    /// Intermediate checkpoint cadence in rounds; 0 keeps only the final one.
    pub checkpoint_every: u64,
    pub env: EnvSpec,
    pub learner: SacConfig,
    pub generator: GeneratorConfig,
    pub eval: EvalSchedule,
}

impl RunConfig {
    pub fn new(method: MethodSpec, rounds: u64, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            method,
            rounds,
            seed,
            out_dir: out_dir.into(),
            paper_hparams: false,
            snapshot_every: 100,
            checkpoint_every: 0,
            env: EnvSpec::default(),
            learner: SacConfig::desk(),
            generator: GeneratorConfig::default(),
            eval: EvalSchedule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.learner.validate()?;
        self.generator.validate()?;
        if self.eval.every == 0 {
            return Err(Error::Config("eval.every must be positive".into()));
        }
        if self.eval.episodes == 0 || self.eval.skill_episodes == 0 {
            return Err(Error::Config(
                "eval.episodes and eval.skill_episodes must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Sets the large-scale table values: batch 1024 and width 1024 for
    /// learners and generators, and the long episode length.
    pub fn apply_paper_hparams(&mut self) {
        self.paper_hparams = true;
        let paper = SacConfig::paper();
        for sac in [&mut self.learner, &mut self.generator.sac] {
            sac.batch_size = paper.batch_size;
            sac.hidden_dim = paper.hidden_dim;
            sac.gamma = paper.gamma;
            sac.init_alpha = paper.init_alpha;
            sac.actor_lr = paper.actor_lr;
            sac.critic_lr = paper.critic_lr;
            sac.alpha_lr = paper.alpha_lr;
        }
        self.generator.updates_per_round = 100;
        self.env.episode_length = crate::envs::PAPER_EPISODE_LENGTH;
    }

    /// `<out_dir>/run-<seed>`
    pub fn run_dir(&self) -> PathBuf {
        self.out_dir.join(format!("run-{}", self.seed))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }
}

/// A configuration file as written by a user: everything optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialRunConfig {
    pub method: Option<PartialMethod>,
    pub rounds: Option<u64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub paper_hparams: Option<bool>,
    pub snapshot_every: Option<u64>,
    pub checkpoint_every: Option<u64>,
    pub env: Option<EnvSpec>,
    pub learner: Option<SacConfig>,
    pub generator: Option<GeneratorConfig>,
    pub eval: Option<EvalSchedule>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialMethod {
    pub kind: Option<MethodKind>,
    pub ablations: Option<Ablations>,
}

impl PartialRunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fills defaults, applies the paper flag and validates. Missing
    /// required fields are reported by their dotted name.
    pub fn resolve(self) -> Result<RunConfig> {
        let method = self.method.unwrap_or_default();
        let kind = method
            .kind
            .ok_or_else(|| Error::Config("missing required field `method.kind`".into()))?;
        let rounds = self
            .rounds
            .ok_or_else(|| Error::Config("missing required field `rounds`".into()))?;
        let spec = MethodSpec {
            kind,
            ablations: method.ablations.unwrap_or_default(),
        };
        let mut cfg = RunConfig::new(
            spec,
            rounds,
            self.seed.unwrap_or(0),
            self.out_dir.unwrap_or_else(|| "runs".into()),
        );
        if let Some(v) = self.snapshot_every {
            cfg.snapshot_every = v;
        }
        if let Some(v) = self.checkpoint_every {
            cfg.checkpoint_every = v;
        }
        if let Some(v) = self.env {
            cfg.env = v;
        }
        if let Some(v) = self.learner {
            cfg.learner = v;
        }
        if let Some(v) = self.generator {
            cfg.generator = v;
        }
        if let Some(v) = self.eval {
            cfg.eval = v;
        }
        if self.paper_hparams.unwrap_or(false) {
            cfg.apply_paper_hparams();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
