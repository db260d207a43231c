use crate::error::{contract, Result};

/// SINR of the user served on beam `serving` when every beam of `active`
/// carries `P / s`, rebuilt from the user's per-beam INRs:
/// `INR_q / (s / P + sum_{j in active, j != q} INR_j)`.
///
/// `inrs` is indexed by the same beam ids as `active`.
pub fn sinr_from_inrs(inrs: &[f64], serving: usize, active: &[usize], power: f64) -> Result<f64> {
    if !active.contains(&serving) {
        return contract(format!("serving beam {serving} not in active set {active:?}"));
    }
    if let Some(&bad) = active.iter().find(|&&j| j >= inrs.len()) {
        return contract(format!("beam {bad} has no INR"));
    }
    if !(power > 0.0) {
        return contract(format!("power must be positive, got {power}"));
    }
    let s = active.len() as f64;
    let interference: f64 = active.iter().filter(|&&j| j != serving).map(|&j| inrs[j]).sum();
    Ok(inrs[serving] / (s / power + interference))
}

/// Same reconstruction with an explicit per-beam power.
pub(crate) fn sinr_with_beam_power(inrs: &[f64], serving: usize, active: &[usize], beam_power: f64) -> f64 {
    let interference: f64 = active.iter().filter(|&&j| j != serving).map(|&j| inrs[j]).sum();
    inrs[serving] / (1.0 / beam_power + interference)
}
