//! One-step SAC goal generator.
//!
//! The "state" is `s0 ++ z` with `z ~ N(0, I)`; the "action" is a goal
//! squashed into the in-distribution goal box; the "reward" is a regret.
//! Episodes last a single step, so critics regress directly onto stored
//! regrets with no bootstrap term.

use serde::{Deserialize, Serialize};

use super::config::GeneratorConfig;
use super::record::GoalProposalRecord;
use crate::autodiff::{sample_head_batch, squashed_gaussian, AdamConfig, AdamState, Mlp};
use crate::envs::GoalSpace;
use crate::error::{check_dim, Result};
use crate::learner::{
    initial_log_alpha, policy_step, regression_step, Learner, PolicyStep, ReplayBuffer,
};
use crate::rng::StreamRng;

/// A freshly proposed goal together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub s0: Vec<f64>,
    pub z: Vec<f64>,
    /// Pre-squash Gaussian sample.
    pub raw: Vec<f64>,
    pub goal: Vec<f64>,
}

impl Proposal {
    pub fn into_record(self, regret: f64, round: u64) -> Result<GoalProposalRecord> {
        GoalProposalRecord::new(self.s0, self.z, self.raw, self.goal, regret, round)
    }
}

/// Source of value estimates `V(s0, g)` used to refresh stored regrets.
pub trait ValueEstimator {
    fn estimate(&self, queries: &[(&[f64], &[f64])]) -> Result<Vec<f64>>;
}

impl ValueEstimator for Learner {
    fn estimate(&self, queries: &[(&[f64], &[f64])]) -> Result<Vec<f64>> {
        self.value_estimates(queries)
    }
}

/// Adapts a per-query closure into a [`ValueEstimator`].
pub struct FnEstimator<F>(pub F);

impl<F: Fn(&[f64], &[f64]) -> f64> ValueEstimator for FnEstimator<F> {
    fn estimate(&self, queries: &[(&[f64], &[f64])]) -> Result<Vec<f64>> {
        Ok(queries.iter().map(|(s, g)| (self.0)(s, g)).collect())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RefreshStats {
    pub refreshed: usize,
    pub skipped_non_finite: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub critic_loss: f64,
    pub actor_loss: f64,
    pub alpha: f64,
    pub entropy: f64,
    pub updates: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GeneratorDiagnostics {
    pub skipped_non_finite: u64,
    pub empty_buffer_updates: u64,
}

/// `-dim` measured on the normalized `[-1, 1]` action box, expressed in goal
/// units: `-dim + sum(ln(half_width))`. Log-probabilities carry the rescale
/// term, so the target has to carry it too for the usual SAC default.
pub fn default_target_entropy(space: &GoalSpace) -> f64 {
    space
        .low()
        .iter()
        .zip(space.high())
        .map(|(l, h)| (0.5 * (h - l)).ln() - 1.0)
        .sum()
}

#[derive(Debug, Clone)]
pub struct GoalGenerator {
    config: GeneratorConfig,
    space: GoalSpace,
    obs_dim: usize,
    target_entropy: f64,
    actor: Mlp,
    actor_opt: AdamState,
    critics: [Mlp; 2],
    critic_opts: [AdamState; 2],
    log_alpha: f64,
    alpha_opt: AdamState,
    buffer: ReplayBuffer<GoalProposalRecord>,
    rng: StreamRng,
    diagnostics: GeneratorDiagnostics,
}

impl GoalGenerator {
    pub fn new(
        config: GeneratorConfig,
        space: GoalSpace,
        obs_dim: usize,
        mut rng: StreamRng,
    ) -> Result<Self> {
        config.validate()?;
        let sac = &config.sac;
        let state_dim = obs_dim + config.noise_dim;
        let actor = Mlp::new(&sac.layer_dims(state_dim, 2 * space.dim()), &mut rng)?;
        let critic_dims = sac.layer_dims(state_dim + space.dim(), 1);
        let critics = [
            Mlp::new(&critic_dims, &mut rng)?,
            Mlp::new(&critic_dims, &mut rng)?,
        ];
        Ok(Self {
            target_entropy: sac
                .target_entropy
                .unwrap_or_else(|| default_target_entropy(&space)),
            actor_opt: AdamState::new(actor.num_params(), AdamConfig::with_lr(sac.actor_lr)),
            critic_opts: [
                AdamState::new(critics[0].num_params(), AdamConfig::with_lr(sac.critic_lr)),
                AdamState::new(critics[1].num_params(), AdamConfig::with_lr(sac.critic_lr)),
            ],
            log_alpha: initial_log_alpha(sac),
            alpha_opt: AdamState::new(1, AdamConfig::with_lr(sac.alpha_lr)),
            buffer: ReplayBuffer::new(sac.buffer_capacity),
            actor,
            critics,
            config,
            space,
            obs_dim,
            rng,
            diagnostics: GeneratorDiagnostics::default(),
        })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn goal_space(&self) -> &GoalSpace {
        &self.space
    }

    pub fn buffer(&self) -> &ReplayBuffer<GoalProposalRecord> {
        &self.buffer
    }

    pub fn diagnostics(&self) -> GeneratorDiagnostics {
        self.diagnostics
    }

    pub fn target_entropy(&self) -> f64 {
        self.target_entropy
    }

    pub fn alpha(&self) -> f64 {
        if self.config.sac.fixed_alpha {
            self.config.sac.init_alpha
        } else {
            self.log_alpha.exp()
        }
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn actor_mut(&mut self) -> &mut Mlp {
        &mut self.actor
    }

    pub fn critics(&self) -> &[Mlp; 2] {
        &self.critics
    }

    fn state(&self, s0: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        check_dim("generator observation", self.obs_dim, s0.len())?;
        check_dim("generator noise", self.config.noise_dim, z.len())?;
        let mut x = s0.to_vec();
        x.extend_from_slice(z);
        Ok(x)
    }

    /// Draws `z` and the sampling noise from `rng` and proposes a goal.
    pub fn propose(&self, s0: &[f64], rng: &mut StreamRng) -> Result<Proposal> {
        let z = rng.normals(self.config.noise_dim);
        let eps = rng.normals(self.space.dim());
        self.propose_with_noise(s0, &z, &eps)
    }

    /// Proposal with explicit latent `z` and sampling noise `eps`.
    pub fn propose_with_noise(&self, s0: &[f64], z: &[f64], eps: &[f64]) -> Result<Proposal> {
        let head = self.actor.forward(&self.state(s0, z)?)?;
        let d = self.space.dim();
        let out = squashed_gaussian(
            &head[..d],
            &head[d..],
            self.space.low(),
            self.space.high(),
            eps,
        )?;
        Ok(Proposal {
            s0: s0.to_vec(),
            z: z.to_vec(),
            raw: out.pre_tanh,
            goal: out.action,
        })
    }

    /// A proposal record for a goal this generator did not sample itself
    /// (the other generator's goal in a symmetric round).
    pub fn adopt(&self, proposal: &Proposal) -> Proposal {
        let raw = proposal
            .goal
            .iter()
            .zip(self.space.low().iter().zip(self.space.high()))
            .map(|(g, (l, h))| {
                (2.0 * (g - l) / (h - l) - 1.0)
                    .clamp(-1.0 + 1e-12, 1.0 - 1e-12)
                    .atanh()
            })
            .collect();
        Proposal {
            raw,
            ..proposal.clone()
        }
    }

    /// Clears stored records when history is disabled; call at the start of
    /// every round.
    pub fn begin_round(&mut self) {
        if !self.config.keep_history {
            self.buffer.clear();
        }
    }

    pub fn record(&mut self, record: GoalProposalRecord) -> Result<()> {
        check_dim("record goal", self.space.dim(), record.goal().len())?;
        self.buffer.push(record);
        Ok(())
    }

    /// Re-estimates every stored regret as
    /// `beta * old + (1 - beta) * (V_self(s0, g) - V_other(s0, g))`.
    ///
    /// A strict no-op before `refresh_start`, between refresh intervals and
    /// when `beta` is 1.
    pub fn refresh_regrets(
        &mut self,
        value_self: &dyn ValueEstimator,
        value_other: &dyn ValueEstimator,
        round: u64,
    ) -> Result<RefreshStats> {
        let cfg = &self.config;
        if round < cfg.refresh_start
            || !(round - cfg.refresh_start).is_multiple_of(cfg.refresh_interval)
        {
            return Ok(RefreshStats::default());
        }
        refresh_buffer(&mut self.buffer, value_self, value_other, round, cfg.beta).inspect(
            |stats| {
                self.diagnostics.skipped_non_finite += stats.skipped_non_finite as u64;
            },
        )
    }

    /// `n_updates` one-step SAC updates on minibatches of stored records.
    pub fn update(&mut self, n_updates: usize) -> Result<GeneratorReport> {
        if self.buffer.is_empty() {
            if n_updates > 0 {
                self.diagnostics.empty_buffer_updates += 1;
            }
            return Ok(GeneratorReport {
                alpha: self.alpha(),
                ..GeneratorReport::default()
            });
        }
        let mut report = GeneratorReport::default();
        for _ in 0..n_updates {
            report = self.update_once()?;
        }
        report.updates = n_updates;
        Ok(report)
    }

    fn update_once(&mut self) -> Result<GeneratorReport> {
        let n = self.config.sac.batch_size;
        let d = self.space.dim();
        let idx = self.buffer.sample_indices(n, &mut self.rng);
        let state_dim = self.obs_dim + self.config.noise_dim;
        let mut states = Vec::with_capacity(n * state_dim);
        let mut critic_in = Vec::with_capacity(n * (state_dim + d));
        let mut regrets = Vec::with_capacity(n);
        for &i in &idx {
            let r = self.buffer.get(i).unwrap();
            states.extend_from_slice(r.s0());
            states.extend_from_slice(r.z());
            critic_in.extend_from_slice(r.s0());
            critic_in.extend_from_slice(r.z());
            critic_in.extend_from_slice(r.goal());
            regrets.push(r.regret());
        }

        let mut critic_loss = 0.0;
        let mut critic_grads = Vec::with_capacity(2);
        for critic in &self.critics {
            let (loss, grad) = regression_step(critic, &critic_in, &regrets)?;
            critic_loss += loss;
            critic_grads.push(grad);
        }

        let alpha = self.alpha();
        let noise = self.rng.normals(n * d);
        let PolicyStep {
            actor_grad,
            actor_loss,
            mean_log_prob,
        } = policy_step(
            &self.actor,
            &self.critics,
            &states,
            n,
            self.space.low(),
            self.space.high(),
            alpha,
            &noise,
        )?;

        for ((critic, opt), grad) in self
            .critics
            .iter_mut()
            .zip(&mut self.critic_opts)
            .zip(&critic_grads)
        {
            opt.step(critic.params_mut(), grad)?;
        }
        self.actor_opt.step(self.actor.params_mut(), &actor_grad)?;
        if !self.config.sac.fixed_alpha {
            let mut la = [self.log_alpha];
            self.alpha_opt
                .step(&mut la, &[-(mean_log_prob + self.target_entropy)])?;
            self.log_alpha = la[0];
        }
        Ok(GeneratorReport {
            critic_loss,
            actor_loss,
            alpha,
            entropy: -mean_log_prob,
            updates: 1,
        })
    }

    /// Actor loss `mean(alpha log pi - min Q)` on re-proposed goals for the
    /// given states and sampling noise, without updating anything.
    pub fn actor_objective(&self, states: &[f64], noise: &[f64]) -> Result<f64> {
        let n = noise.len() / self.space.dim();
        Ok(policy_step(
            &self.actor,
            &self.critics,
            states,
            n,
            self.space.low(),
            self.space.high(),
            self.alpha(),
            noise,
        )?
        .actor_loss)
    }

    /// `min(Q1, Q2)` for each `(s0 ++ z, goal)` row.
    pub fn critic_values(&self, states: &[f64], goals: &[f64]) -> Result<Vec<f64>> {
        let state_dim = self.obs_dim + self.config.noise_dim;
        let d = self.space.dim();
        let n = goals.len() / d;
        check_dim("critic states", n * state_dim, states.len())?;
        let mut input = Vec::with_capacity(n * (state_dim + d));
        for (s, g) in states.chunks_exact(state_dim).zip(goals.chunks_exact(d)) {
            input.extend_from_slice(s);
            input.extend_from_slice(g);
        }
        let q1 = self.critics[0].predict_batch(&input, n)?;
        let q2 = self.critics[1].predict_batch(&input, n)?;
        Ok(q1.iter().zip(&q2).map(|(a, b)| a.min(*b)).collect())
    }

    /// Re-proposed goals (actions) for a batch of states and sampling noise.
    pub fn sample_goals(&self, states: &[f64], noise: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = noise.len() / self.space.dim();
        let head = self.actor.predict_batch(states, n)?;
        Ok(
            sample_head_batch(&head, n, self.space.low(), self.space.high(), noise)?
                .into_iter()
                .map(|s| s.action)
                .collect(),
        )
    }
}

/// Blend refresh over a record buffer; see [`GoalGenerator::refresh_regrets`].
pub fn refresh_buffer(
    buffer: &mut ReplayBuffer<GoalProposalRecord>,
    value_self: &dyn ValueEstimator,
    value_other: &dyn ValueEstimator,
    round: u64,
    beta: f64,
) -> Result<RefreshStats> {
    let mut stats = RefreshStats::default();
    // With beta = 1 the blend keeps every old value; skip it so the buffer
    // stays bitwise unchanged (including -0.0 regrets and refresh rounds).
    if buffer.is_empty() || beta == 1.0 {
        return Ok(stats);
    }
    let queries: Vec<(&[f64], &[f64])> = buffer.iter().map(|r| (r.s0(), r.goal())).collect();
    let mine = value_self.estimate(&queries)?;
    let theirs = value_other.estimate(&queries)?;
    drop(queries);
    for (record, (a, b)) in buffer.iter_mut().zip(mine.iter().zip(&theirs)) {
        let fresh = a - b;
        if fresh.is_finite() {
            record.blend(beta, fresh, round);
            stats.refreshed += 1;
        } else {
            stats.skipped_non_finite += 1;
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::SacConfig;
    use crate::rng::Stream;

    fn small_config() -> GeneratorConfig {
        GeneratorConfig {
            sac: SacConfig {
                hidden_dim: 32,
                batch_size: 32,
                buffer_capacity: 1000,
                ..SacConfig::desk()
            },
            ..GeneratorConfig::default()
        }
    }

    fn generator(cfg: GeneratorConfig) -> GoalGenerator {
        let space = GoalSpace::square(0.25);
        GoalGenerator::new(cfg, space, 4, StreamRng::new(3, Stream::GenA)).unwrap()
    }

    fn record(regret: f64, round: u64) -> GoalProposalRecord {
        GoalProposalRecord::new(
            vec![0.0; 4],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.1, -0.1],
            regret,
            round,
        )
        .unwrap()
    }

    #[test]
    fn proposals_stay_inside_goal_box() {
        let gen = generator(small_config());
        let mut rng = StreamRng::new(9, Stream::GenA);
        for _ in 0..10_000 {
            let p = gen.propose(&[0.0, 0.0, 0.0, 0.0], &mut rng).unwrap();
            assert!(gen.goal_space().contains(&p.goal), "{:?}", p.goal);
        }
    }

    #[test]
    fn zero_network_and_noise_propose_midpoint() {
        let mut gen = generator(small_config());
        gen.actor_mut()
            .params_mut()
            .iter_mut()
            .for_each(|p| *p = 0.0);
        let p = gen
            .propose_with_noise(&[0.3; 4], &[0.0; 2], &[0.0; 2])
            .unwrap();
        assert_eq!(p.goal, vec![0.0, 0.0]);
    }

    #[test]
    fn buffer_evicts_oldest_at_capacity() {
        let mut cfg = small_config();
        cfg.sac.buffer_capacity = 2;
        let mut gen = generator(cfg);
        for round in 0..3 {
            gen.record(record(round as f64, round)).unwrap();
        }
        let rounds: Vec<u64> = gen.buffer().iter().map(|r| r.round_proposed()).collect();
        assert_eq!(rounds, vec![1, 2]);
    }

    #[test]
    fn refresh_blends_old_and_new() {
        let mut gen = generator(small_config());
        gen.record(record(1.0, 0)).unwrap();
        let zero = FnEstimator(|_: &[f64], _: &[f64]| 0.0);
        gen.refresh_regrets(&zero, &zero, 100).unwrap();
        assert_eq!(gen.buffer().get(0).unwrap().regret(), 0.5);
        assert_eq!(gen.buffer().get(0).unwrap().round_last_refreshed(), 100);
        gen.refresh_regrets(&zero, &zero, 101).unwrap();
        assert_eq!(gen.buffer().get(0).unwrap().regret(), 0.25);
    }

    #[test]
    fn refresh_uses_value_difference() {
        let mut gen = generator(small_config());
        gen.record(record(0.0, 0)).unwrap();
        let mine = FnEstimator(|_: &[f64], g: &[f64]| g[0]);
        let theirs = FnEstimator(|_: &[f64], g: &[f64]| g[1]);
        gen.refresh_regrets(&mine, &theirs, 200).unwrap();
        assert!((gen.buffer().get(0).unwrap().regret() - 0.5 * 0.2).abs() < 1e-15);
    }

    #[test]
    fn beta_one_leaves_regrets_unchanged() {
        let mut cfg = small_config();
        cfg.beta = 1.0;
        let mut gen = generator(cfg);
        gen.record(record(0.7, 0)).unwrap();
        gen.record(record(-0.0, 0)).unwrap();
        let before = gen.buffer().clone();
        let one = FnEstimator(|_: &[f64], _: &[f64]| 1.0);
        let zero = FnEstimator(|_: &[f64], _: &[f64]| 0.0);
        let stats = gen.refresh_regrets(&one, &zero, 500).unwrap();
        assert_eq!(stats.refreshed, 0);
        assert_eq!(gen.buffer().get(0).unwrap().regret(), 0.7);
        assert!(gen.buffer().get(1).unwrap().regret().is_sign_negative());
        assert_eq!(gen.buffer(), &before);
    }

    #[test]
    fn refresh_before_start_is_noop() {
        let mut gen = generator(small_config());
        for i in 0..5 {
            gen.record(record(i as f64, i)).unwrap();
        }
        let before = gen.buffer().clone();
        let one = FnEstimator(|_: &[f64], _: &[f64]| 1.0);
        let zero = FnEstimator(|_: &[f64], _: &[f64]| 0.0);
        let stats = gen.refresh_regrets(&one, &zero, 99).unwrap();
        assert_eq!(stats.refreshed, 0);
        let same = before.iter().zip(gen.buffer().iter()).all(|(a, b)| {
            a.regret().to_bits() == b.regret().to_bits()
                && a.round_last_refreshed() == b.round_last_refreshed()
        });
        assert!(same);
    }

    #[test]
    fn non_finite_estimates_are_skipped() {
        let mut gen = generator(small_config());
        gen.record(record(0.3, 0)).unwrap();
        let nan = FnEstimator(|_: &[f64], _: &[f64]| f64::NAN);
        let stats = gen.refresh_regrets(&nan, &nan, 100).unwrap();
        assert_eq!(stats.skipped_non_finite, 1);
        assert_eq!(gen.buffer().get(0).unwrap().regret(), 0.3);
        assert_eq!(gen.diagnostics().skipped_non_finite, 1);
    }

    #[test]
    fn critic_regresses_onto_single_regret() {
        let mut cfg = small_config();
        cfg.sac.critic_lr = 1e-3;
        let mut gen = generator(cfg);
        gen.record(record(5.0, 0)).unwrap();
        gen.update(2000).unwrap();
        let r = gen.buffer().get(0).unwrap();
        let mut state = r.s0().to_vec();
        state.extend_from_slice(r.z());
        let q = gen.critic_values(&state, r.goal()).unwrap()[0];
        assert!((q - 5.0).abs() < 0.1, "q = {q}");
    }

    #[test]
    fn zero_temperature_actor_loss_is_negative_mean_q() {
        let mut cfg = small_config();
        cfg.sac.fixed_alpha = true;
        cfg.sac.init_alpha = 0.0;
        let gen = generator(cfg);
        let mut rng = StreamRng::new(4, Stream::GenA);
        let n = 16;
        let states = rng.normals(n * 6);
        let noise = rng.normals(n * 2);
        let goals: Vec<f64> = gen.sample_goals(&states, &noise).unwrap().concat();
        let q = gen.critic_values(&states, &goals).unwrap();
        let mean_q = q.iter().sum::<f64>() / n as f64;
        let loss = gen.actor_objective(&states, &noise).unwrap();
        assert!((loss + mean_q).abs() < 1e-12);
    }

    #[test]
    fn default_target_is_unit_box_minus_dim() {
        assert_eq!(default_target_entropy(&GoalSpace::square(1.0)), -2.0);
        let t = default_target_entropy(&GoalSpace::square(0.25));
        assert!((t - (-2.0 + 2.0 * 0.25f64.ln())).abs() < 1e-15);
        let mut cfg = small_config();
        cfg.sac.target_entropy = Some(-7.0);
        assert_eq!(generator(cfg).target_entropy(), -7.0);
    }

    #[test]
    fn update_on_empty_buffer_is_counted() {
        let mut gen = generator(small_config());
        let before = gen.actor().params().to_vec();
        gen.update(10).unwrap();
        assert_eq!(gen.actor().params(), &before[..]);
        assert_eq!(gen.diagnostics().empty_buffer_updates, 1);
    }

    #[test]
    fn disabled_history_clears_each_round() {
        let mut cfg = small_config();
        cfg.keep_history = false;
        let mut gen = generator(cfg);
        gen.record(record(1.0, 0)).unwrap();
        gen.begin_round();
        assert!(gen.buffer().is_empty());
    }

    #[test]
    fn adopted_raw_matches_own_sample() {
        let gen = generator(small_config());
        let mut rng = StreamRng::new(1, Stream::GenB);
        let p = gen.propose(&[0.0; 4], &mut rng).unwrap();
        let adopted = gen.adopt(&p);
        for (a, b) in adopted.raw.iter().zip(&p.raw) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
