use serde::{Deserialize, Serialize};

use super::env_spec::EnvSpec;
use super::method::{MethodKind, MethodSpec};
use crate::envs::{GoalSpace, PointMass, PointMassState, RewardSpec, ACTION_DIM, OBS_DIM};
use crate::error::{Error, Result};
use crate::eval::{run_episode, run_free_episode, Episode};
use crate::goalgen::{GeneratorConfig, GeneratorReport, GoalGenerator, Proposal, RefreshStats};
use crate::learner::{her_relabel, ActMode, Learner, LossReport, SacConfig};
use crate::rng::{Stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalSlot {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorId {
    GenA,
    GenB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutLog {
    pub player: Player,
    /// `None` for a goal-free rollout.
    pub goal: Option<GoalSlot>,
    #[serde(rename = "return")]
    pub ret: f64,
    pub success: bool,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorReward {
    pub generator: GeneratorId,
    pub goal: GoalSlot,
    pub reward: f64,
}

/// Ordered record of what happened inside a round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "phase")]
pub enum Phase {
    Rollout {
        player: Player,
        goal: Option<GoalSlot>,
    },
    Train {
        players: Vec<Player>,
    },
    GeneratorUpdate {
        generator: GeneratorId,
    },
}

/// Everything one round produced; one line of `metrics.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: u64,
    pub method: String,
    pub goal_a: Option<Vec<f64>>,
    pub goal_b: Option<Vec<f64>>,
    pub rollouts: Vec<RolloutLog>,
    pub generator_rewards: Vec<GeneratorReward>,
    /// Terminal reward given to a goal-free Alice.
    pub alice_reward: Option<f64>,
    pub phases: Vec<Phase>,
    pub alice_loss: Option<LossReport>,
    pub bob_loss: Option<LossReport>,
    pub gen_a: Option<GeneratorReport>,
    pub gen_b: Option<GeneratorReport>,
    pub refresh_a: Option<RefreshStats>,
    pub refresh_b: Option<RefreshStats>,
}

impl RoundLog {
    fn new(round: u64, method: String) -> Self {
        Self {
            round,
            method,
            goal_a: None,
            goal_b: None,
            rollouts: Vec::new(),
            generator_rewards: Vec::new(),
            alice_reward: None,
            phases: Vec::new(),
            alice_loss: None,
            bob_loss: None,
            gen_a: None,
            gen_b: None,
            refresh_a: None,
            refresh_b: None,
        }
    }

    /// Return of the first rollout by `player` on `goal`.
    pub fn ret(&self, player: Player, goal: GoalSlot) -> Option<f64> {
        self.rollouts
            .iter()
            .find(|r| r.player == player && r.goal == Some(goal))
            .map(|r| r.ret)
    }

    pub fn reward(&self, generator: GeneratorId, goal: GoalSlot) -> Option<f64> {
        self.generator_rewards
            .iter()
            .find(|r| r.generator == generator && r.goal == goal)
            .map(|r| r.reward)
    }

    pub fn count_phases(&self, pred: impl Fn(&Phase) -> bool) -> usize {
        self.phases.iter().filter(|p| pred(p)).count()
    }
}

/// Cumulative structural counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub rounds: u64,
    pub rollouts: u64,
    pub learner_train_phases: u64,
    pub generator_update_phases: u64,
    pub env_steps: u64,
    pub aborted_rounds: u64,
}

/// Per-player random streams.
#[derive(Debug, Clone)]
struct Streams {
    env: StreamRng,
    alice: StreamRng,
    bob: StreamRng,
    gen_a: StreamRng,
    gen_b: StreamRng,
}

/// All players of one run plus the world they act in.
#[derive(Debug, Clone)]
pub struct Game {
    method: MethodSpec,
    env_spec: EnvSpec,
    env: PointMass,
    reward: RewardSpec,
    goal_space: GoalSpace,
    gamma: f64,
    /// Action mode of every round-level rollout.
    pub rollout_mode: ActMode,
    pub alice: Option<Learner>,
    /// The evaluated learner (the only one for single-learner methods).
    pub bob: Learner,
    pub gen_a: Option<GoalGenerator>,
    pub gen_b: Option<GoalGenerator>,
    streams: Streams,
    counters: Counters,
    round: u64,
}

fn missing(player: &str) -> Error {
    Error::State(format!("method has no {player}"))
}

struct Outcome {
    episode: Episode,
    ret: f64,
}

impl Game {
    pub fn new(
        method: MethodSpec,
        env_spec: EnvSpec,
        learner: &SacConfig,
        generator: &GeneratorConfig,
        seed: u64,
    ) -> Result<Self> {
        env_spec.validate()?;
        let kind = method.effective_kind();
        let goal_space = env_spec.goal_space();
        let goal_dim = goal_space.dim();
        let make_learner = |stream| {
            Learner::new(
                learner.clone(),
                OBS_DIM,
                goal_dim,
                ACTION_DIM,
                StreamRng::new(seed, stream),
            )
        };
        let gen_cfg = method.generator_config(generator);
        let make_gen = |stream| {
            GoalGenerator::new(
                gen_cfg.clone(),
                goal_space.clone(),
                OBS_DIM,
                StreamRng::new(seed, stream),
            )
        };
        let two_learners = matches!(
            kind,
            MethodKind::Cusp
                | MethodKind::PairedSingle
                | MethodKind::AspSparse
                | MethodKind::AspDense
        );
        Ok(Self {
            alice: if two_learners {
                Some(make_learner(Stream::Alice)?)
            } else {
                None
            },
            bob: make_learner(Stream::Bob)?,
            gen_a: if kind.uses_generators() {
                Some(make_gen(Stream::GenA)?)
            } else {
                None
            },
            gen_b: if kind == MethodKind::Cusp {
                Some(make_gen(Stream::GenB)?)
            } else {
                None
            },
            streams: Streams {
                env: StreamRng::new(seed, Stream::Env),
                alice: StreamRng::with_index(seed, Stream::Alice, 1),
                bob: StreamRng::with_index(seed, Stream::Bob, 1),
                gen_a: StreamRng::with_index(seed, Stream::GenA, 1),
                gen_b: StreamRng::with_index(seed, Stream::GenB, 1),
            },
            env: env_spec.env(),
            reward: env_spec.reward_spec(),
            gamma: learner.gamma,
            rollout_mode: ActMode::Stochastic,
            counters: Counters::default(),
            round: 0,
            method,
            env_spec,
            goal_space,
        })
    }

    pub fn method(&self) -> &MethodSpec {
        &self.method
    }

    pub fn env(&self) -> &PointMass {
        &self.env
    }

    pub fn env_spec(&self) -> &EnvSpec {
        &self.env_spec
    }

    pub fn reward_spec(&self) -> &RewardSpec {
        &self.reward
    }

    pub fn goal_space(&self) -> &GoalSpace {
        &self.goal_space
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Rounds completed so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Runs the next round of the configured method.
    ///
    /// On error the round is abandoned and the counters record it; players
    /// keep whatever state their last completed update left them in.
    pub fn play_round(&mut self) -> Result<RoundLog> {
        let round = self.round + 1;
        let result = match self.method.effective_kind() {
            MethodKind::Cusp => self.cusp_round(round),
            MethodKind::DomainRandomization => self.dr_round(round),
            MethodKind::PairedSingle => self.paired_single_round(round),
            MethodKind::SingleLearner => self.single_learner_round(round),
            MethodKind::AspSparse => self.asp_round(round, false),
            MethodKind::AspDense => self.asp_round(round, true),
        };
        match result {
            Ok(log) => {
                self.round = round;
                self.counters.rounds += 1;
                Ok(log)
            }
            Err(e) => {
                self.round = round;
                self.counters.aborted_rounds += 1;
                Err(e)
            }
        }
    }

    fn rollout(
        &mut self,
        player: Player,
        start: PointMassState,
        goal: &[f64],
        log: &mut RoundLog,
        slot: GoalSlot,
    ) -> Result<Outcome> {
        let (learner, rng) = match player {
            Player::Alice => (
                self.alice.as_ref().ok_or_else(|| missing("Alice"))?,
                &mut self.streams.alice,
            ),
            Player::Bob => (&self.bob, &mut self.streams.bob),
        };
        let episode = run_episode(
            learner,
            &self.env,
            start,
            goal,
            &self.reward,
            self.rollout_mode,
            rng,
        )?;
        let ret = if self.env_spec.discounted_returns {
            episode.discounted_return(self.gamma)
        } else {
            episode.ret
        };
        self.counters.rollouts += 1;
        self.counters.env_steps += episode.steps() as u64;
        log.phases.push(Phase::Rollout {
            player,
            goal: Some(slot),
        });
        log.rollouts.push(RolloutLog {
            player,
            goal: Some(slot),
            ret,
            success: episode.success,
            steps: episode.steps(),
        });
        Ok(Outcome { episode, ret })
    }

    /// Stores each episode (plus hindsight copies when `relabel` is set) and
    /// runs one update per environment step collected.
    fn train(&mut self, batches: Vec<(Player, Episode, bool)>, log: &mut RoundLog) -> Result<()> {
        let mut players = Vec::new();
        for (player, episode, relabel) in batches {
            let (learner, rng) = match player {
                Player::Alice => (
                    self.alice.as_mut().ok_or_else(|| missing("Alice"))?,
                    &mut self.streams.alice,
                ),
                Player::Bob => (&mut self.bob, &mut self.streams.bob),
            };
            let steps = episode.steps();
            let relabeled = if relabel && self.env_spec.her_k > 0 {
                her_relabel(
                    &episode.transitions,
                    self.env_spec.her_strategy,
                    self.env_spec.her_k,
                    &self.reward,
                    rng,
                )
            } else {
                Vec::new()
            };
            for t in episode.transitions.into_iter().chain(relabeled) {
                learner.store(t);
            }
            let report = learner.train(steps)?;
            match player {
                Player::Alice => log.alice_loss = report.or(log.alice_loss),
                Player::Bob => log.bob_loss = report.or(log.bob_loss),
            }
            players.push(player);
        }
        self.counters.learner_train_phases += 1;
        log.phases.push(Phase::Train { players });
        Ok(())
    }

    fn update_generator(&mut self, id: GeneratorId, round: u64, log: &mut RoundLog) -> Result<()> {
        let (gen, self_learner, other_learner) = match id {
            GeneratorId::GenA => (self.gen_a.as_mut(), self.alice.as_ref(), &self.bob),
            GeneratorId::GenB => (
                self.gen_b.as_mut(),
                Some(&self.bob),
                self.alice.as_ref().unwrap_or(&self.bob),
            ),
        };
        let gen = gen.ok_or_else(|| Error::State(format!("method has no {id:?}")))?;
        let refresh = match self_learner {
            Some(me) => gen.refresh_regrets(me, other_learner, round)?,
            None => RefreshStats::default(),
        };
        let report = gen.update(gen.config().updates_per_round)?;
        self.counters.generator_update_phases += 1;
        log.phases.push(Phase::GeneratorUpdate { generator: id });
        match id {
            GeneratorId::GenA => {
                log.refresh_a = Some(refresh);
                log.gen_a = Some(report);
            }
            GeneratorId::GenB => {
                log.refresh_b = Some(refresh);
                log.gen_b = Some(report);
            }
        }
        Ok(())
    }

    fn propose(&mut self, id: GeneratorId, s0: &PointMassState) -> Result<Proposal> {
        let obs = s0.observation();
        match id {
            GeneratorId::GenA => self
                .gen_a
                .as_ref()
                .ok_or_else(|| missing("GenA"))?
                .propose(&obs, &mut self.streams.gen_a),
            GeneratorId::GenB => self
                .gen_b
                .as_ref()
                .ok_or_else(|| missing("GenB"))?
                .propose(&obs, &mut self.streams.gen_b),
        }
    }

    fn begin_generators(&mut self) {
        for gen in [self.gen_a.as_mut(), self.gen_b.as_mut()]
            .into_iter()
            .flatten()
        {
            gen.begin_round();
        }
    }

    fn log_for(&self, round: u64) -> RoundLog {
        RoundLog::new(round, self.method.label())
    }

    /// One pass of the symmetric four-player game: easy goals first, then
    /// hard goals, then zero-sum generator rewards for both goals.
    pub fn cusp_round(&mut self, round: u64) -> Result<RoundLog> {
        let mut log = self.log_for(round);
        self.begin_generators();
        let (s0_a, _) = self.env.reset(&mut self.streams.env);
        let (s0_b, _) = self.env.reset(&mut self.streams.env);
        let prop_a = self.propose(GeneratorId::GenA, &s0_a)?;
        let prop_b = self.propose(GeneratorId::GenB, &s0_b)?;
        let (g_a, g_b) = (prop_a.goal.clone(), prop_b.goal.clone());
        log.goal_a = Some(g_a.clone());
        log.goal_b = Some(g_b.clone());

        let alice_easy = self.rollout(Player::Alice, s0_a, &g_a, &mut log, GoalSlot::A)?;
        let bob_easy = self.rollout(Player::Bob, s0_b, &g_b, &mut log, GoalSlot::B)?;
        let (r_a_easy, r_b_easy) = (alice_easy.ret, bob_easy.ret);
        self.train(
            vec![
                (Player::Alice, alice_easy.episode, true),
                (Player::Bob, bob_easy.episode, true),
            ],
            &mut log,
        )?;

        let alice_hard = self.rollout(Player::Alice, s0_b, &g_b, &mut log, GoalSlot::B)?;
        let bob_hard = self.rollout(Player::Bob, s0_a, &g_a, &mut log, GoalSlot::A)?;
        let (r_a_hard, r_b_hard) = (alice_hard.ret, bob_hard.ret);
        self.train(
            vec![
                (Player::Alice, alice_hard.episode, true),
                (Player::Bob, bob_hard.episode, true),
            ],
            &mut log,
        )?;

        let regret_a = r_a_easy - r_b_hard;
        let regret_b = r_a_hard - r_b_easy;
        log.generator_rewards = vec![
            GeneratorReward {
                generator: GeneratorId::GenA,
                goal: GoalSlot::A,
                reward: regret_a,
            },
            GeneratorReward {
                generator: GeneratorId::GenA,
                goal: GoalSlot::B,
                reward: regret_b,
            },
            GeneratorReward {
                generator: GeneratorId::GenB,
                goal: GoalSlot::A,
                reward: -regret_a,
            },
            GeneratorReward {
                generator: GeneratorId::GenB,
                goal: GoalSlot::B,
                reward: -regret_b,
            },
        ];
        {
            let gen_a = self.gen_a.as_mut().expect("cusp has GenA");
            let adopted_b = gen_a.adopt(&prop_b);
            gen_a.record(prop_a.clone().into_record(regret_a, round)?)?;
            gen_a.record(adopted_b.into_record(regret_b, round)?)?;
        }
        {
            let gen_b = self.gen_b.as_mut().expect("cusp has GenB");
            let adopted_a = gen_b.adopt(&prop_a);
            gen_b.record(adopted_a.into_record(-regret_a, round)?)?;
            gen_b.record(prop_b.into_record(-regret_b, round)?)?;
        }
        self.update_generator(GeneratorId::GenA, round, &mut log)?;
        self.update_generator(GeneratorId::GenB, round, &mut log)?;
        Ok(log)
    }

    /// Uniform goal from the training space; only Bob plays.
    pub fn dr_round(&mut self, round: u64) -> Result<RoundLog> {
        let mut log = self.log_for(round);
        let goal = self.goal_space.sample(&mut self.streams.gen_a);
        let (s0, _) = self.env.reset(&mut self.streams.env);
        log.goal_a = Some(goal.clone());
        let out = self.rollout(Player::Bob, s0, &goal, &mut log, GoalSlot::A)?;
        self.train(vec![(Player::Bob, out.episode, true)], &mut log)?;
        Ok(log)
    }

    /// One generator rewarded with `R^A(g) - R^B(g)` on a single goal.
    pub fn paired_single_round(&mut self, round: u64) -> Result<RoundLog> {
        let mut log = self.log_for(round);
        self.begin_generators();
        let (s0, _) = self.env.reset(&mut self.streams.env);
        let prop = self.propose(GeneratorId::GenA, &s0)?;
        let goal = prop.goal.clone();
        log.goal_a = Some(goal.clone());
        let a = self.rollout(Player::Alice, s0, &goal, &mut log, GoalSlot::A)?;
        let b = self.rollout(Player::Bob, s0, &goal, &mut log, GoalSlot::A)?;
        let regret = a.ret - b.ret;
        self.train(
            vec![
                (Player::Alice, a.episode, true),
                (Player::Bob, b.episode, true),
            ],
            &mut log,
        )?;
        log.generator_rewards = vec![GeneratorReward {
            generator: GeneratorId::GenA,
            goal: GoalSlot::A,
            reward: regret,
        }];
        self.gen_a
            .as_mut()
            .expect("paired has GenA")
            .record(prop.into_record(regret, round)?)?;
        self.update_generator(GeneratorId::GenA, round, &mut log)?;
        Ok(log)
    }

    /// One learner rolled out twice on the same goal; the generator is
    /// rewarded with the difference of the two returns.
    pub fn single_learner_round(&mut self, round: u64) -> Result<RoundLog> {
        let mut log = self.log_for(round);
        self.begin_generators();
        let (s0, _) = self.env.reset(&mut self.streams.env);
        let prop = self.propose(GeneratorId::GenA, &s0)?;
        let goal = prop.goal.clone();
        log.goal_a = Some(goal.clone());
        let first = self.rollout(Player::Bob, s0, &goal, &mut log, GoalSlot::A)?;
        let second = self.rollout(Player::Bob, s0, &goal, &mut log, GoalSlot::A)?;
        let regret = first.ret - second.ret;
        self.train(
            vec![
                (Player::Bob, first.episode, true),
                (Player::Bob, second.episode, true),
            ],
            &mut log,
        )?;
        log.generator_rewards = vec![GeneratorReward {
            generator: GeneratorId::GenA,
            goal: GoalSlot::A,
            reward: regret,
        }];
        self.gen_a
            .as_mut()
            .expect("single learner has GenA")
            .record(prop.into_record(regret, round)?)?;
        self.update_generator(GeneratorId::GenA, round, &mut log)?;
        Ok(log)
    }

    /// Asymmetric self play: Alice wanders with a null goal, her final
    /// position becomes Bob's goal, and Alice is paid for Bob's failure.
    pub fn asp_round(&mut self, round: u64, dense: bool) -> Result<RoundLog> {
        let mut log = self.log_for(round);
        let (s0, _) = self.env.reset(&mut self.streams.env);
        let null_goal = vec![0.0; self.goal_space.dim()];
        let mut alice_ep = run_free_episode(
            self.alice.as_ref().ok_or_else(|| missing("Alice"))?,
            &self.env,
            s0,
            &null_goal,
            self.rollout_mode,
            &mut self.streams.alice,
        )?;
        self.counters.rollouts += 1;
        self.counters.env_steps += alice_ep.steps() as u64;
        log.phases.push(Phase::Rollout {
            player: Player::Alice,
            goal: None,
        });

        let end = alice_ep.final_position();
        let clamped = self.env.clamp_to_world(&end);
        if clamped[..] != end[..] {
            log::warn!("round {round}: Alice ended outside the world at {end:?}; clamped");
        }
        let mut goal = clamped;
        let mid = self.goal_space.midpoint();
        goal.extend_from_slice(&mid[goal.len()..]);
        log.goal_a = Some(goal.clone());

        let bob = self.rollout(Player::Bob, s0, &goal, &mut log, GoalSlot::A)?;
        let alice_reward = if dense {
            -bob.ret
        } else if bob.episode.success {
            0.0
        } else {
            1.0
        };
        if let Some(last) = alice_ep.transitions.last_mut() {
            last.reward = alice_reward;
            last.done = true;
        }
        alice_ep.ret = alice_reward;
        log.alice_reward = Some(alice_reward);
        log.rollouts.insert(
            0,
            RolloutLog {
                player: Player::Alice,
                goal: None,
                ret: alice_reward,
                success: false,
                steps: alice_ep.steps(),
            },
        );

        // Alice's episode has no goal to relabel toward.
        self.train(
            vec![
                (Player::Alice, alice_ep, false),
                (Player::Bob, bob.episode, true),
            ],
            &mut log,
        )?;
        Ok(log)
    }
}
