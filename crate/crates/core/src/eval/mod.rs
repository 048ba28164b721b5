//! Evaluation protocols, rollouts and goal snapshots.

mod harness;
mod rollout;
mod snapshot;

pub use harness::{
    evaluate, in_pocket, skill_goal_set, EvalReport, EvalSpec, GoalResult, GoalSource,
    SKILL_GOAL_SETS,
};
pub use rollout::{run_episode, run_free_episode, Episode};
pub use snapshot::{read_snapshot, snapshot_goals, SnapshotRow};
