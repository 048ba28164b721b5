use serde::Serialize;

use crate::error::{Error, Result};

/// One stored goal proposal.
///
/// `(s0, z, raw, goal, round_proposed)` are fixed at construction; only the
/// regret and its refresh round change afterwards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalProposalRecord {
    s0: Vec<f64>,
    z: Vec<f64>,
    raw: Vec<f64>,
    goal: Vec<f64>,
    regret: f64,
    round_proposed: u64,
    round_last_refreshed: u64,
}

impl GoalProposalRecord {
    pub fn new(
        s0: Vec<f64>,
        z: Vec<f64>,
        raw: Vec<f64>,
        goal: Vec<f64>,
        regret: f64,
        round: u64,
    ) -> Result<Self> {
        if !regret.is_finite() {
            return Err(Error::Numeric(format!("regret {regret} for goal {goal:?}")));
        }
        Ok(Self {
            s0,
            z,
            raw,
            goal,
            regret,
            round_proposed: round,
            round_last_refreshed: round,
        })
    }

    pub fn s0(&self) -> &[f64] {
        &self.s0
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn goal(&self) -> &[f64] {
        &self.goal
    }

    pub fn regret(&self) -> f64 {
        self.regret
    }

    pub fn round_proposed(&self) -> u64 {
        self.round_proposed
    }

    pub fn round_last_refreshed(&self) -> u64 {
        self.round_last_refreshed
    }

    pub(crate) fn blend(&mut self, beta: f64, fresh: f64, round: u64) {
        self.regret = beta * self.regret + (1.0 - beta) * fresh;
        self.round_last_refreshed = round.max(self.round_proposed);
    }
}
