//! Regret-maximizing one-step SAC goal generators.

mod config;
mod generator;
mod record;

pub use config::GeneratorConfig;
pub use generator::{
    default_target_entropy, refresh_buffer, FnEstimator, GeneratorDiagnostics, GeneratorReport,
    GoalGenerator, Proposal, RefreshStats, ValueEstimator,
};
pub use record::GoalProposalRecord;
