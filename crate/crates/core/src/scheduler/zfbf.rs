use crate::channel::ChannelRealization;
use crate::error::{config, Result};
use crate::linalg::pseudo_inverse;
use crate::{CMatrix, CVector};

use super::{Beam, ScheduleDecision, Scheme};

/// Default semi-orthogonality threshold.
pub const DEFAULT_EPS_SUS: f64 = 0.3;

/// Zero-forcing beamforming with semi-orthogonal user selection on `h_csit`.
///
/// Selection starts from the strongest user and repeatedly adds the
/// candidate with the largest component orthogonal to the selected
/// channels, among users whose normalized correlation with every selected
/// user is below `eps_sus`. It stops at `M` users, when no candidate is
/// left, or when the ZF sum rate would drop.
pub fn schedule_zfbf_sus(channel: &ChannelRealization, power: f64, eps_sus: f64) -> Result<ScheduleDecision> {
    if !(power > 0.0) {
        return config(format!("power must be positive, got {power}"));
    }
    if !(eps_sus > 0.0) {
        return config(format!("eps_sus must be positive, got {eps_sus}"));
    }
    let h = channel.csit();
    let m = channel.antennas();
    let k_count = channel.users();
    let cols: Vec<CVector> = (0..k_count).map(|k| h.column(k).into_owned()).collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.norm()).collect();

    let mut selected: Vec<usize> = Vec::new();
    let mut basis: Vec<CVector> = Vec::new();
    let mut current: Option<(f64, CMatrix, Vec<f64>)> = None;

    while selected.len() < m.min(k_count) {
        let mut best: Option<(usize, f64, CVector)> = None;
        for k in 0..k_count {
            if selected.contains(&k) || norms[k] == 0.0 {
                continue;
            }
            let semi_orthogonal = selected
                .iter()
                .all(|&j| cols[j].dotc(&cols[k]).norm() / (norms[j] * norms[k]) < eps_sus);
            if !semi_orthogonal {
                continue;
            }
            let mut r = cols[k].clone();
            for q in &basis {
                let c = q.dotc(&r);
                r -= q * c;
            }
            let rn = r.norm();
            if best.as_ref().is_none_or(|(_, b, _)| rn > *b) {
                best = Some((k, rn, r));
            }
        }
        let Some((k, rn, r)) = best else { break };
        if rn <= 1e-12 * norms[k] {
            break;
        }
        let mut trial = selected.clone();
        trial.push(k);
        let (rate, w, sinrs) = zf_rate(h, &channel.noise_power, &trial, power)?;
        if current.as_ref().is_some_and(|(c, _, _)| rate < *c) {
            break;
        }
        selected = trial;
        basis.push(r.unscale(rn));
        current = Some((rate, w, sinrs));
    }

    let mut d = ScheduleDecision::empty(Scheme::ZfbfSus, m);
    if let Some((rate, w, sinrs)) = current {
        let s = selected.len();
        d.beams = (0..s).map(Beam::Column).collect();
        d.powers = vec![power / s as f64; s];
        d.users = selected;
        d.precoders = w;
        d.predicted_sinrs = sinrs;
        d.objective = rate;
    }
    Ok(d)
}

/// ZF precoders for `users`, their SINRs under equal power, and the sum rate.
fn zf_rate(h: &CMatrix, noise: &[f64], users: &[usize], power: f64) -> Result<(f64, CMatrix, Vec<f64>)> {
    let hs = h.select_columns(users);
    let mut w = pseudo_inverse(&hs.adjoint())?;
    for mut col in w.column_iter_mut() {
        let n = col.norm();
        col.unscale_mut(n);
    }
    let p = power / users.len() as f64;
    let sinrs: Vec<f64> = users
        .iter()
        .enumerate()
        .map(|(i, &k)| p * hs.column(i).dotc(&w.column(i)).norm_sqr() / noise[k])
        .collect();
    let rate = sinrs.iter().map(|g| (1.0 + g).log2()).sum();
    Ok((rate, w, sinrs))
}
