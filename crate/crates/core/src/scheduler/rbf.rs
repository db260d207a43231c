use crate::channel::ChannelRealization;
use crate::error::{config, contract, Result};
use crate::CMatrix;

use super::{Beam, ScheduleDecision, Scheme};

/// `table[k][m]`: SINR of user `k` on beam `m` when all `M` beams carry `P / M`.
pub fn rbf_sinr_table(h: &CMatrix, noise_power: &[f64], beams: &CMatrix, power: f64) -> Result<Vec<Vec<f64>>> {
    let m = beams.ncols();
    if beams.nrows() != h.nrows() {
        return contract("beam dimension differs from antenna count");
    }
    if noise_power.len() != h.ncols() {
        return contract("noise power length differs from user count");
    }
    if !(power > 0.0) {
        return config(format!("power must be positive, got {power}"));
    }
    let proj = h.ad_mul(beams);
    Ok((0..h.ncols())
        .map(|k| {
            let g: Vec<f64> = (0..m).map(|j| proj[(k, j)].norm_sqr()).collect();
            let total: f64 = g.iter().sum();
            let floor = m as f64 * noise_power[k] / power;
            g.iter().map(|&x| x / (floor + (total - x).max(0.0))).collect()
        })
        .collect())
}

/// Random beamforming: each beam goes to its strongest user.
///
/// Pairs are taken in decreasing SINR order and kept when both the user and
/// the beam are still free, so a user winning several beams keeps its best
/// and the other beams fall to their runner-up. Beams left without a user
/// are not transmitted; served beams keep `P / M`.
pub fn schedule_rbf(channel: &ChannelRealization, beams: &CMatrix, power: f64) -> Result<ScheduleDecision> {
    let m = channel.antennas();
    if beams.ncols() != m {
        return contract("random beam set must have M columns");
    }
    let table = rbf_sinr_table(channel.csit(), &channel.noise_power, beams, power)?;
    let mut pairs: Vec<(usize, usize, f64)> = table
        .iter()
        .enumerate()
        .flat_map(|(k, row)| row.iter().enumerate().map(move |(j, &g)| (k, j, g)))
        .collect();
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));

    let mut user_of_beam: Vec<Option<(usize, f64)>> = vec![None; m];
    let mut user_used = vec![false; channel.users()];
    for (k, j, g) in pairs {
        if !user_used[k] && user_of_beam[j].is_none() {
            user_used[k] = true;
            user_of_beam[j] = Some((k, g));
        }
    }

    let mut d = ScheduleDecision::empty(Scheme::Rbf, m);
    let mut cols = Vec::new();
    for (j, slot) in user_of_beam.iter().enumerate() {
        if let Some((k, g)) = *slot {
            d.users.push(k);
            d.beams.push(Beam::Column(j));
            d.powers.push(power / m as f64);
            d.predicted_sinrs.push(g);
            cols.push(beams.column(j).into_owned());
        }
    }
    d.precoders = if cols.is_empty() { CMatrix::zeros(m, 0) } else { CMatrix::from_columns(&cols) };
    d.objective = d.predicted_sum_rate();
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gen_channel, Correlation};
    use crate::codebook::build_random_unitary;

    fn channel(m: usize, k: usize, seed: u64) -> ChannelRealization {
        gen_channel(&Correlation::Iid { m }, vec![1.0; k], seed).unwrap()
    }

    #[test]
    fn single_user_takes_its_best_beam_only() {
        let ch = channel(4, 1, 3);
        let b = build_random_unitary(4, 9).unwrap();
        let d = schedule_rbf(&ch, &b, 10.0).unwrap();
        assert_eq!(d.len(), 1);
        let table = rbf_sinr_table(&ch.h_true, &ch.noise_power, &b, 10.0).unwrap();
        let best = (0..4).fold(0, |b, j| if table[0][j] > table[0][b] { j } else { b });
        assert_eq!(d.beams[0], Beam::Column(best));
        d.validate(10.0, 4).unwrap();
    }

    #[test]
    fn distinct_winners_fill_every_beam() {
        let b = build_random_unitary(2, 1).unwrap();
        // user k's channel is beam k, so it dominates that beam only
        let h = CMatrix::from_columns(&[b.column(0) * crate::C64::from(2.0), b.column(1) * crate::C64::from(2.0)]);
        let ch = ChannelRealization { h_true: h, noise_power: vec![1.0; 2], h_csit: None, err_var: 0.0 };
        let d = schedule_rbf(&ch, &b, 10.0).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.users, vec![0, 1]);
        for g in &d.predicted_sinrs {
            assert!((g - 20.0).abs() < 1e-9);
        }
    }

    #[test]
    fn winners_match_brute_force_table() {
        for seed in 0..50 {
            let ch = channel(2, 3, seed);
            let b = build_random_unitary(2, seed + 1000).unwrap();
            let d = schedule_rbf(&ch, &b, 10.0).unwrap();
            let table = rbf_sinr_table(&ch.h_true, &ch.noise_power, &b, 10.0).unwrap();
            // brute force: the largest table entry is served, and the other
            // beam goes to the strongest remaining user
            let (kmax, jmax) = (0..3)
                .flat_map(|k| (0..2).map(move |j| (k, j)))
                .max_by(|a, b| table[a.0][a.1].total_cmp(&table[b.0][b.1]).then(b.cmp(a)))
                .unwrap();
            let other = 1 - jmax;
            let runner = (0..3)
                .filter(|&k| k != kmax)
                .max_by(|&a, &b| table[a][other].total_cmp(&table[b][other]).then(b.cmp(&a)))
                .unwrap();
            assert_eq!(d.len(), 2);
            let pos = |j| d.beams.iter().position(|x| *x == Beam::Column(j)).unwrap();
            assert_eq!(d.users[pos(jmax)], kmax);
            assert_eq!(d.users[pos(other)], runner);
            for (i, &k) in d.users.iter().enumerate() {
                assert_eq!(d.predicted_sinrs[i], table[k][d.beams[i].id()]);
            }
        }
    }
}
