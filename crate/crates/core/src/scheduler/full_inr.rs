use crate::codebook::{BeamIndex, Codebook};
use crate::error::{config, contract, Result};
use crate::feedback::FullInrReport;

use super::partial_inr::next_combination;
use super::{max_weight_assignment, sinr_with_beam_power, Beam, ScheduleDecision, Scheme};

/// Largest `sum_{s=1}^{M} C(MT, s)` the exhaustive search accepts.
pub const FULL_INR_EXHAUSTIVE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullInrMode {
    /// Add the best (user, beam) pair while the sum rate grows.
    Greedy,
    /// Optimal assignment for every beam subset of every size.
    Exhaustive,
}

/// `sum_{s=1}^{M} C(MT, s)`, saturating.
pub fn full_inr_search_size(m: usize, t: usize) -> u128 {
    let n = (m * t) as u128;
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for s in 1..=m as u128 {
        c = match c.checked_mul(n + 1 - s) {
            Some(x) => x / s,
            None => return u128::MAX,
        };
        total = total.saturating_add(c);
    }
    total
}

/// Scheduling over arbitrary codebook beams from full INR feedback, with
/// equal power `P / s` over the `s` served beams.
pub fn schedule_full_inr(
    reports: &[FullInrReport],
    codebook: &Codebook,
    power: f64,
    mode: FullInrMode,
) -> Result<ScheduleDecision> {
    let m = codebook.antennas();
    if reports.iter().any(|r| r.inrs.len() != codebook.size()) {
        return contract("full INR report length differs from codebook size");
    }
    if !(power > 0.0) {
        return config(format!("power must be positive, got {power}"));
    }
    if reports.is_empty() {
        return Ok(ScheduleDecision::empty(Scheme::FullInr, m));
    }
    let pairs = match mode {
        FullInrMode::Greedy => greedy(reports, codebook, power),
        FullInrMode::Exhaustive => {
            let size = full_inr_search_size(m, codebook.num_subsets());
            if size > FULL_INR_EXHAUSTIVE_CAP {
                return config(format!(
                    "exhaustive full INR search needs {size} subsets (cap {FULL_INR_EXHAUSTIVE_CAP}); use greedy mode"
                ));
            }
            exhaustive(reports, codebook, power)
        }
    };
    Ok(decision(reports, codebook, power, &pairs))
}

fn pair_rates(reports: &[FullInrReport], pairs: &[(usize, usize)], power: f64) -> f64 {
    let active: Vec<usize> = pairs.iter().map(|&(_, l)| l).collect();
    let p = power / pairs.len() as f64;
    pairs
        .iter()
        .map(|&(k, l)| (1.0 + sinr_with_beam_power(&reports[k].inrs, l, &active, p)).log2())
        .sum()
}

fn greedy(reports: &[FullInrReport], codebook: &Codebook, power: f64) -> Vec<(usize, usize)> {
    let m = codebook.antennas();
    let n_beams = codebook.size();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut current = 0.0;
    let mut user_used = vec![false; reports.len()];
    let mut beam_used = vec![false; n_beams];
    while chosen.len() < m.min(reports.len()) {
        let mut best: Option<(usize, usize, f64)> = None;
        let mut trial = chosen.clone();
        trial.push((0, 0));
        for k in (0..reports.len()).filter(|&k| !user_used[k]) {
            for l in (0..n_beams).filter(|&l| !beam_used[l]) {
                *trial.last_mut().unwrap() = (k, l);
                let r = pair_rates(reports, &trial, power);
                if best.is_none_or(|(_, _, b)| r > b) {
                    best = Some((k, l, r));
                }
            }
        }
        match best {
            Some((k, l, r)) if r > current => {
                chosen.push((k, l));
                user_used[k] = true;
                beam_used[l] = true;
                current = r;
            }
            _ => break,
        }
    }
    chosen
}

fn exhaustive(reports: &[FullInrReport], codebook: &Codebook, power: f64) -> Vec<(usize, usize)> {
    let m = codebook.antennas();
    let n_beams = codebook.size();
    let k_count = reports.len();
    let mut best: (f64, Vec<(usize, usize)>) = (0.0, Vec::new());
    for s in 1..=m.min(k_count) {
        let p = power / s as f64;
        let mut combo: Vec<usize> = (0..s).collect();
        loop {
            let weights: Vec<Vec<f64>> = combo
                .iter()
                .map(|&q| {
                    reports
                        .iter()
                        .map(|r| (1.0 + sinr_with_beam_power(&r.inrs, q, &combo, p)).log2())
                        .collect()
                })
                .collect();
            let assign = max_weight_assignment(&weights);
            let total: f64 = assign.iter().enumerate().map(|(b, &k)| weights[b][k]).sum();
            if total > best.0 {
                best = (total, combo.iter().zip(&assign).map(|(&l, &k)| (k, l)).collect());
            }
            if next_combination(&mut combo, n_beams).is_none() {
                break;
            }
        }
    }
    best.1
}

fn decision(
    reports: &[FullInrReport],
    codebook: &Codebook,
    power: f64,
    pairs: &[(usize, usize)],
) -> ScheduleDecision {
    let mut d = ScheduleDecision::empty(Scheme::FullInr, codebook.antennas());
    if pairs.is_empty() {
        return d;
    }
    let active: Vec<usize> = pairs.iter().map(|&(_, l)| l).collect();
    let p = power / pairs.len() as f64;
    for &(k, l) in pairs {
        d.users.push(k);
        d.beams.push(Beam::Codebook(BeamIndex::from_flat(l, codebook.num_subsets())));
        d.powers.push(p);
        d.predicted_sinrs.push(sinr_with_beam_power(&reports[k].inrs, l, &active, p));
    }
    d.precoders = codebook.precoders(&active);
    d.objective = d.predicted_sum_rate();
    d
}
