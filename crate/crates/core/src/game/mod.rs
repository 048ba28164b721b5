//! Round orchestration for CuSP and every baseline, plus the training
//! driver that writes run directories.

mod env_spec;
mod method;
mod round;
mod train;

pub use env_spec::EnvSpec;
pub use method::{Ablations, MethodKind, MethodSpec};
pub use round::{
    Counters, Game, GeneratorId, GeneratorReward, GoalSlot, Phase, Player, RolloutLog, RoundLog,
};
pub use train::{
    eval_rng, eval_spec, evaluate_sets, new_game, train, TrainSummary, SCHEMA_VERSION,
};
