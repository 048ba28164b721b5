//! Proposal processes on the synthetic regret landscape.
//!
//! Each step proposes one point, scores it with the landscape at the current
//! step, and performs exactly one optimizer update.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autodiff::{AdamConfig, AdamState};
use crate::envs::{GoalSpace, LandscapeConfig};
use crate::error::{Error, Result};
use crate::goalgen::{FnEstimator, GeneratorConfig, GoalGenerator};
use crate::learner::SacConfig;
use crate::rng::{Stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchVariant {
    Stationary,
    Nonstationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchOptimizer {
    Adam,
    Ppo1,
    Sac,
    SacRefresh,
}

macro_rules! named_enum {
    ($ty:ty, $what:literal, $($variant:path => $name:literal),+) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.replace('-', "_").as_str() {
                    $($name => Ok($variant),)+
                    other => Err(Error::Config(format!(
                        "unknown {} '{other}' (expected one of: {})",
                        $what,
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }
    };
}

named_enum!(BenchVariant, "landscape variant", BenchVariant::Stationary => "stationary", BenchVariant::Nonstationary => "nonstationary");
named_enum!(
    BenchOptimizer,
    "optimizer",
    BenchOptimizer::Adam => "adam",
    BenchOptimizer::Ppo1 => "ppo1",
    BenchOptimizer::Sac => "sac",
    BenchOptimizer::SacRefresh => "sac_refresh"
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoConfig {
    pub lr: f64,
    pub clip: f64,
    /// Most recent proposals used for each surrogate step.
    pub batch: usize,
    pub init_log_std: f64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            lr: 3e-4,
            clip: 0.2,
            batch: 64,
            init_log_std: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub variant: BenchVariant,
    pub optimizer: BenchOptimizer,
    pub steps: u64,
    pub seed: u64,
    /// Half width of the square proposal box.
    pub half_width: f64,
    /// Initial point for `adam`.
    pub start: [f64; 2],
    pub adam: AdamConfig,
    pub ppo: PpoConfig,
    pub generator: GeneratorConfig,
}

impl BenchConfig {
    pub fn new(variant: BenchVariant, optimizer: BenchOptimizer, steps: u64, seed: u64) -> Self {
        Self {
            variant,
            optimizer,
            steps,
            seed,
            half_width: 0.5,
            start: [0.0, 0.0],
            adam: AdamConfig::default(),
            ppo: PpoConfig::default(),
            generator: bench_generator_config(),
        }
    }

    pub fn landscape(&self) -> LandscapeConfig {
        match self.variant {
            BenchVariant::Stationary => LandscapeConfig::stationary(),
            BenchVariant::Nonstationary => LandscapeConfig::drifting(),
        }
    }
}

/// One update per proposal, every stored regret refreshed from the live
/// landscape each step when refresh is on.
pub fn bench_generator_config() -> GeneratorConfig {
    GeneratorConfig {
        sac: SacConfig {
            hidden_dim: 64,
            batch_size: 64,
            actor_lr: 1e-3,
            critic_lr: 1e-3,
            alpha_lr: 1e-2,
            buffer_capacity: 1_000_000,
            ..SacConfig::desk()
        },
        updates_per_round: 1,
        refresh_start: 0,
        beta: 0.5,
        refresh_interval: 1,
        noise_dim: 2,
        keep_history: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchProposal {
    pub step: u64,
    pub x: f64,
    pub y: f64,
    pub regret: f64,
    pub center_x: f64,
    pub center_y: f64,
}

impl BenchProposal {
    pub fn distance_to_center(&self) -> f64 {
        ((self.x - self.center_x).powi(2) + (self.y - self.center_y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTrace {
    pub config: BenchConfig,
    pub proposals: Vec<BenchProposal>,
}

impl BenchTrace {
    fn tail(&self, n: usize) -> &[BenchProposal] {
        &self.proposals[self.proposals.len().saturating_sub(n)..]
    }

    /// Fraction of the last `n` proposals within `radius` of `point`.
    pub fn fraction_within(&self, n: usize, point: [f64; 2], radius: f64) -> f64 {
        let tail = self.tail(n);
        let hits = tail
            .iter()
            .filter(|p| ((p.x - point[0]).powi(2) + (p.y - point[1]).powi(2)).sqrt() < radius)
            .count();
        hits as f64 / tail.len().max(1) as f64
    }

    /// Mean distance of the last `n` proposals to the center live at their
    /// own step.
    pub fn mean_distance_to_center(&self, n: usize) -> f64 {
        let tail = self.tail(n);
        tail.iter()
            .map(BenchProposal::distance_to_center)
            .sum::<f64>()
            / tail.len().max(1) as f64
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.proposals {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| Error::io("bench trace", e))
    }
}

/// Runs the configured proposal process.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchTrace> {
    if !(cfg.half_width > 0.0) {
        return Err(Error::Config("bench half_width must be positive".into()));
    }
    let landscape = cfg.landscape();
    let space = GoalSpace::square(cfg.half_width);
    let mut rng = StreamRng::new(cfg.seed, Stream::Bench);
    let mut proposals = Vec::with_capacity(cfg.steps as usize);
    let mut log = |step: u64, p: &[f64], regret: f64| {
        let c = landscape.center(step);
        proposals.push(BenchProposal {
            step,
            x: p[0],
            y: p[1],
            regret,
            center_x: c[0],
            center_y: c[1],
        });
    };
    match cfg.optimizer {
        BenchOptimizer::Adam => {
            let mut point = space.clamp(&cfg.start);
            let mut opt = AdamState::new(2, cfg.adam);
            for step in 0..cfg.steps {
                log(step, &point, landscape.regret(&point, step));
                // Ascend the regret: descend its negation.
                let grad: Vec<f64> = landscape
                    .gradient(&point, step)
                    .iter()
                    .map(|g| -g)
                    .collect();
                opt.step(&mut point, &grad)?;
                point = space.clamp(&point);
            }
        }
        BenchOptimizer::Ppo1 => {
            let mut ppo = Ppo1::new(&cfg.ppo, &space);
            for step in 0..cfg.steps {
                let (goal, u, log_prob) = ppo.sample(&mut rng);
                let regret = landscape.regret(&goal, step);
                log(step, &goal, regret);
                ppo.push(u, log_prob, regret);
                ppo.update()?;
            }
        }
        BenchOptimizer::Sac | BenchOptimizer::SacRefresh => {
            let refresh = cfg.optimizer == BenchOptimizer::SacRefresh;
            let mut gen_cfg = cfg.generator.clone();
            if !refresh {
                gen_cfg.beta = 1.0;
            }
            let mut gen = GoalGenerator::new(
                gen_cfg,
                space.clone(),
                0,
                StreamRng::new(cfg.seed, Stream::GenA),
            )?;
            let zero = FnEstimator(|_: &[f64], _: &[f64]| 0.0);
            for step in 0..cfg.steps {
                let proposal = gen.propose(&[], &mut rng)?;
                let regret = landscape.regret(&proposal.goal, step);
                log(step, &proposal.goal, regret);
                gen.record(proposal.into_record(regret, step)?)?;
                if refresh {
                    let live = FnEstimator(|_: &[f64], g: &[f64]| landscape.regret(g, step));
                    gen.refresh_regrets(&live, &zero, step)?;
                }
                gen.update(gen.config().updates_per_round)?;
            }
        }
    }
    Ok(BenchTrace {
        config: cfg.clone(),
        proposals,
    })
}

/// State-free squashed-Gaussian proposer trained with the clipped surrogate
/// on a sliding window of recent proposals.
struct Ppo1 {
    cfg: PpoConfig,
    low: Vec<f64>,
    high: Vec<f64>,
    /// `[mean_x, mean_y, log_std_x, log_std_y]` in pre-squash space.
    params: Vec<f64>,
    opt: AdamState,
    window: std::collections::VecDeque<(Vec<f64>, f64, f64)>,
}

impl Ppo1 {
    fn new(cfg: &PpoConfig, space: &GoalSpace) -> Self {
        Self {
            cfg: cfg.clone(),
            low: space.low().to_vec(),
            high: space.high().to_vec(),
            params: vec![0.0, 0.0, cfg.init_log_std, cfg.init_log_std],
            opt: AdamState::new(4, AdamConfig::with_lr(cfg.lr)),
            window: Default::default(),
        }
    }

    /// Gaussian log-density of pre-squash `u`; the squash correction does
    /// not depend on the parameters and cancels in every ratio.
    fn log_prob(&self, u: &[f64]) -> f64 {
        (0..2)
            .map(|i| {
                let ls = self.params[2 + i];
                let z = (u[i] - self.params[i]) / ls.exp();
                -0.5 * z * z - ls - 0.5 * (2.0 * std::f64::consts::PI).ln()
            })
            .sum()
    }

    fn sample(&self, rng: &mut StreamRng) -> (Vec<f64>, Vec<f64>, f64) {
        let u: Vec<f64> = (0..2)
            .map(|i| self.params[i] + self.params[2 + i].exp() * rng.normal())
            .collect();
        let goal = (0..2)
            .map(|i| {
                let half = 0.5 * (self.high[i] - self.low[i]);
                self.low[i] + (u[i].tanh() + 1.0) * half
            })
            .collect();
        let lp = self.log_prob(&u);
        (goal, u, lp)
    }

    fn push(&mut self, u: Vec<f64>, log_prob: f64, reward: f64) {
        self.window.push_back((u, log_prob, reward));
        if self.window.len() > self.cfg.batch {
            self.window.pop_front();
        }
    }

    /// One gradient step on `-mean(min(ratio A, clip(ratio) A))` with
    /// standardized advantages.
    fn update(&mut self) -> Result<()> {
        let n = self.window.len() as f64;
        let mean = self.window.iter().map(|w| w.2).sum::<f64>() / n;
        let var = self
            .window
            .iter()
            .map(|w| (w.2 - mean).powi(2))
            .sum::<f64>()
            / n;
        if var <= 0.0 {
            return Ok(());
        }
        let std = var.sqrt();
        let mut grad = [0.0; 4];
        for (u, old_lp, r) in &self.window {
            let adv = (r - mean) / std;
            let ratio = (self.log_prob(u) - old_lp).exp();
            let clipped = ratio.clamp(1.0 - self.cfg.clip, 1.0 + self.cfg.clip);
            // Gradient flows only through the unclipped branch when it is the minimum.
            if ratio * adv > clipped * adv {
                continue;
            }
            for i in 0..2 {
                let sigma = self.params[2 + i].exp();
                let z = (u[i] - self.params[i]) / sigma;
                grad[i] -= adv * ratio * z / sigma / n;
                grad[2 + i] -= adv * ratio * (z * z - 1.0) / n;
            }
        }
        self.opt.step(&mut self.params, &grad)?;
        for ls in &mut self.params[2..] {
            *ls = ls.clamp(-10.0, 2.0);
        }
        Ok(())
    }
}
