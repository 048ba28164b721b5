//! Hindsight relabeling of one episode.

use serde::{Deserialize, Serialize};

use super::sac::Transition;
use crate::envs::RewardSpec;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HerStrategy {
    /// Relabel with the position reached at the end of the episode.
    Final,
    /// Relabel with positions reached later in the same episode.
    Future,
}

/// Position reached after `t`, i.e. the achieved goal.
pub fn achieved_goal(t: &Transition, spec: &RewardSpec) -> Vec<f64> {
    t.next_obs[..spec.feasible_dims].to_vec()
}

/// Extra transitions whose goal is replaced by an achieved one, with reward
/// and terminal flag recomputed from `spec`.
///
/// `Final` yields one relabeled copy per transition; `Future` yields `k`
/// copies per transition with goals drawn from the same or later steps.
/// Goal components beyond `spec.feasible_dims` keep their original values.
pub fn her_relabel(
    trajectory: &[Transition],
    strategy: HerStrategy,
    k: usize,
    spec: &RewardSpec,
    rng: &mut StreamRng,
) -> Vec<Transition> {
    let Some(last) = trajectory.last() else {
        return Vec::new();
    };
    let relabel = |t: &Transition, achieved: &[f64]| {
        let mut goal = t.goal.clone();
        goal[..achieved.len()].copy_from_slice(achieved);
        let position = &t.next_obs[..spec.feasible_dims];
        Transition {
            obs: t.obs.clone(),
            action: t.action.clone(),
            reward: spec.reward(position, &goal),
            next_obs: t.next_obs.clone(),
            done: spec.success(position, &goal),
            goal,
        }
    };
    match strategy {
        HerStrategy::Final => {
            let achieved = achieved_goal(last, spec);
            trajectory.iter().map(|t| relabel(t, &achieved)).collect()
        }
        HerStrategy::Future => {
            let n = trajectory.len();
            let mut out = Vec::with_capacity(n * k);
            for (i, t) in trajectory.iter().enumerate() {
                for _ in 0..k {
                    let j = i + rng.index(n - i);
                    out.push(relabel(t, &achieved_goal(&trajectory[j], spec)));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trajectory(spec: &RewardSpec) -> Vec<Transition> {
        let goal = vec![0.4, 0.4];
        (0..6)
            .map(|i| {
                let p = [0.05 * i as f64, -0.03 * i as f64];
                let q = [0.05 * (i + 1) as f64, -0.03 * (i + 1) as f64];
                Transition {
                    obs: vec![p[0], p[1], 0.0, 0.0],
                    action: vec![0.1, -0.1],
                    reward: spec.reward(&q, &goal),
                    next_obs: vec![q[0], q[1], 0.5, -0.3],
                    done: false,
                    goal: goal.clone(),
                }
            })
            .collect()
    }

    #[test]
    fn final_strategy_relabels_every_step_once() {
        let spec = RewardSpec::dense(0.05);
        let traj = trajectory(&spec);
        let out = her_relabel(
            &traj,
            HerStrategy::Final,
            4,
            &spec,
            &mut StreamRng::new(0, crate::rng::Stream::Bob),
        );
        assert_eq!(out.len(), traj.len());
        assert!(out
            .iter()
            .all(|t| t.goal == achieved_goal(traj.last().unwrap(), &spec)));
        assert_eq!(out.last().unwrap().reward, 0.0);
        assert!(out.last().unwrap().done);
    }

    #[test]
    fn future_goals_come_from_later_steps() {
        let spec = RewardSpec::sparse(0.01);
        let traj = trajectory(&spec);
        let out = her_relabel(
            &traj,
            HerStrategy::Future,
            3,
            &spec,
            &mut StreamRng::new(1, crate::rng::Stream::Bob),
        );
        assert_eq!(out.len(), 3 * traj.len());
        for (i, chunk) in out.chunks(3).enumerate() {
            for t in chunk {
                let j = traj
                    .iter()
                    .position(|s| achieved_goal(s, &spec) == t.goal)
                    .unwrap();
                assert!(j >= i);
            }
        }
    }

    #[test]
    fn empty_trajectory_yields_nothing() {
        let spec = RewardSpec::dense(0.05);
        assert!(her_relabel(
            &[],
            HerStrategy::Future,
            4,
            &spec,
            &mut StreamRng::new(0, crate::rng::Stream::Bob)
        )
        .is_empty());
    }
}
