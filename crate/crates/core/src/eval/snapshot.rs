use std::io::Write;

use crate::error::Result;
use crate::goalgen::GoalProposalRecord;
use crate::learner::ReplayBuffer;

/// Writes every stored proposal as a CSV row
/// `round, round_proposed, g0, g1, ..., regret`, oldest first.
///
/// `goal_dim` fixes the header so an empty buffer still yields a header.
pub fn snapshot_goals<W: Write>(
    buffer: &ReplayBuffer<GoalProposalRecord>,
    goal_dim: usize,
    round: u64,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["round".to_string(), "round_proposed".to_string()];
    header.extend((0..goal_dim).map(|i| format!("g{i}")));
    header.push("regret".to_string());
    w.write_record(&header)?;
    for r in buffer.iter() {
        let mut row = vec![round.to_string(), r.round_proposed().to_string()];
        row.extend(r.goal().iter().map(|g| format!("{g:?}")));
        row.push(format!("{:?}", r.regret()));
        w.write_record(&row)?;
    }
    w.flush()
        .map_err(|e| crate::Error::io("goal snapshot", e))?;
    Ok(())
}

/// One parsed snapshot row.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRow {
    pub round: u64,
    pub round_proposed: u64,
    pub goal: Vec<f64>,
    pub regret: f64,
}

pub fn read_snapshot<R: std::io::Read>(input: R) -> Result<Vec<SnapshotRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
                crate::Error::Checkpoint(format!("bad snapshot field {i} in {rec:?}"))
            })
        };
        let n = rec.len();
        rows.push(SnapshotRow {
            round: field(0)? as u64,
            round_proposed: field(1)? as u64,
            goal: (2..n - 1).map(field).collect::<Result<_>>()?,
            regret: field(n - 1)?,
        });
    }
    Ok(rows)
}
