use crate::error::{contract, Result};
use crate::CMatrix;

use super::ScheduleDecision;

/// Dedicated pilots sharing a resource element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PilotGrouping {
    /// Scheduled user ids per group, in decision order.
    pub groups: Vec<Vec<usize>>,
    /// Two pilot ports fit in one symbol.
    pub symbols_used: usize,
}

/// Groups scheduled users whose mutual leakage is below a threshold.
///
/// `inr_table[i][j]` is the INR of the `i`-th scheduled user toward the
/// beam of the `j`-th. Users `i` and `j` conflict when either sees the
/// other's beam within `threshold_db` of its own serving beam. Groups are
/// first-fit colour classes in decision order.
pub fn pilot_grouping(decision: &ScheduleDecision, inr_table: &[Vec<f64>], threshold_db: f64) -> Result<PilotGrouping> {
    let s = decision.len();
    if inr_table.len() != s || inr_table.iter().any(|row| row.len() != s) {
        return contract(format!("pilot grouping needs a {s} x {s} INR table"));
    }
    let thr = 10f64.powf(threshold_db / 10.0);
    let leaks = |i: usize, j: usize| inr_table[i][j] >= thr * inr_table[i][i] && inr_table[i][j] > 0.0;
    let conflict = |i: usize, j: usize| leaks(i, j) || leaks(j, i);

    let mut colour_members: Vec<Vec<usize>> = Vec::new();
    for i in 0..s {
        match colour_members.iter_mut().find(|c| c.iter().all(|&j| !conflict(i, j))) {
            Some(c) => c.push(i),
            None => colour_members.push(vec![i]),
        }
    }
    let groups: Vec<Vec<usize>> = colour_members
        .iter()
        .map(|c| c.iter().map(|&i| decision.users[i]).collect())
        .collect();
    Ok(PilotGrouping { symbols_used: groups.len().div_ceil(2), groups })
}

/// `table[i][j] = |h_{u_i}^H w_j|^2 / sigma_{u_i}^2` for the scheduled users.
pub fn decision_inr_table(decision: &ScheduleDecision, h: &CMatrix, noise_power: &[f64]) -> Vec<Vec<f64>> {
    decision
        .users
        .iter()
        .map(|&k| {
            let hk = h.column(k);
            (0..decision.len())
                .map(|j| hk.dotc(&decision.precoders.column(j)).norm_sqr() / noise_power[k])
                .collect()
        })
        .collect()
}
