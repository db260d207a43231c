//! Flexible scheduling over one unitary subset from partial INR feedback.
//!
//! Step 1 visits every `(t, s, n)`: subset `t`, size `s`, and the `n`-th
//! `s`-combination of the subset's beams in lexicographic order. Beams of
//! the combination are taken in index order and each gets the user (among
//! those that reported subset `t`) with the largest reconstructed SINR.
//! When that user already holds a beam of the combination the loop for the
//! combination stops, keeping the rate accumulated so far. Step 2 keeps the
//! combination with the largest accumulated rate `mu`.

use crate::codebook::{BeamIndex, Codebook};
use crate::error::{config, contract, Result};
use crate::feedback::{OneBitInrReport, PartialInrReport};

use super::{Beam, ScheduleDecision, Scheme};

/// Upper bound on `T * 2^M` enumerated states.
pub const PARTIAL_INR_ENUMERATION_CAP: u64 = 1 << 20;

/// `T * 2^M`, saturating.
pub fn partial_inr_enumeration_size(m: usize, t: usize) -> u64 {
    if m >= 63 {
        return u64::MAX;
    }
    (t as u64).saturating_mul(1u64 << m)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PartialInrOptions {
    /// On a repeated user, fall back to the best user not yet holding a beam
    /// instead of ending the combination.
    pub resolve_conflicts: bool,
}

/// What the base station knows about one user within its subset.
struct SubsetCqi {
    user: usize,
    subset: usize,
    /// Pseudo-INR per beam of the subset.
    values: Vec<f64>,
    /// Only this beam may serve the user, when set.
    serve_only: Option<usize>,
}

impl SubsetCqi {
    /// SINR on beam `q` given the sum of this user's values over the active
    /// beams (`q` included) and the per-beam power.
    #[inline]
    fn sinr(&self, q: usize, active_total: f64, inv_beam_power: f64) -> f64 {
        if self.serve_only.is_some_and(|o| o != q) {
            return 0.0;
        }
        let v = self.values[q];
        let others = active_total - v;
        if others.is_infinite() {
            return 0.0;
        }
        v / (inv_beam_power + others)
    }

    fn sinr_in_set(&self, q: usize, active: &[usize], inv_beam_power: f64) -> f64 {
        if self.serve_only.is_some_and(|o| o != q) {
            return 0.0;
        }
        let others: f64 = active.iter().filter(|&&j| j != q).map(|&j| self.values[j]).sum();
        if others.is_infinite() {
            return 0.0;
        }
        self.values[q] / (inv_beam_power + others)
    }
}

/// Flexible scheduling from partial INR reports, one report per user.
pub fn schedule_partial_inr(
    reports: &[PartialInrReport],
    codebook: &Codebook,
    power: f64,
    options: PartialInrOptions,
) -> Result<ScheduleDecision> {
    let m = codebook.antennas();
    let mut cqi = Vec::with_capacity(reports.len());
    for (k, r) in reports.iter().enumerate() {
        if r.inrs.len() != m || r.subset_t >= codebook.num_subsets() {
            return contract(format!("malformed partial INR report from user {k}"));
        }
        cqi.push(SubsetCqi { user: k, subset: r.subset_t, values: r.inrs.clone(), serve_only: None });
    }
    enumerate(Scheme::PartialInr, cqi, codebook, power, options)
}

/// Schedules one-bit INR reports with the same enumeration.
///
/// A user can only be served on its reported beam, with SINR `P SNR / s`.
/// A `0` bit is taken as zero interference; a `1` bit as unbounded
/// interference, which excludes the user from any combination containing
/// that beam.
pub fn schedule_one_bit_inr(
    reports: &[OneBitInrReport],
    codebook: &Codebook,
    power: f64,
    options: PartialInrOptions,
) -> Result<ScheduleDecision> {
    let m = codebook.antennas();
    let mut cqi = Vec::with_capacity(reports.len());
    for (k, r) in reports.iter().enumerate() {
        if r.bits.len() + 1 != m || r.beam.subset_t >= codebook.num_subsets() {
            return contract(format!("malformed one-bit report from user {k}"));
        }
        let own = r.beam.within_m;
        let values = (0..m)
            .map(|j| match r.bit(j) {
                None => r.snr,
                Some(true) => f64::INFINITY,
                Some(false) => 0.0,
            })
            .collect();
        cqi.push(SubsetCqi { user: k, subset: r.beam.subset_t, values, serve_only: Some(own) });
    }
    let mut d = enumerate(Scheme::OneBitInr, cqi, codebook, power, options)?;
    d.scheme = Scheme::OneBitInr;
    Ok(d)
}

struct Best {
    mu: f64,
    subset: usize,
    size: usize,
    /// (index into the subset's user list, beam, sinr)
    served: Vec<(usize, usize, f64)>,
}

/// Reports of the users of one subset, laid out beam-major.
struct SubsetTable<'a> {
    users: Vec<&'a SubsetCqi>,
    /// `by_beam[q * n + i]` is user `i`'s value on beam `q`.
    by_beam: Vec<f64>,
    restricted: bool,
}

impl SubsetTable<'_> {
    #[inline]
    fn sinr(&self, i: usize, q: usize, total: f64, inv_beam_power: f64) -> f64 {
        if self.restricted {
            return self.users[i].sinr(q, total, inv_beam_power);
        }
        let v = self.by_beam[q * self.users.len() + i];
        v / (inv_beam_power + (total - v))
    }
}

fn enumerate(
    scheme: Scheme,
    cqi: Vec<SubsetCqi>,
    codebook: &Codebook,
    power: f64,
    options: PartialInrOptions,
) -> Result<ScheduleDecision> {
    let m = codebook.antennas();
    let t_count = codebook.num_subsets();
    if partial_inr_enumeration_size(m, t_count) > PARTIAL_INR_ENUMERATION_CAP {
        return config(format!(
            "partial INR enumeration T*2^M = {t_count}*2^{m} exceeds cap {PARTIAL_INR_ENUMERATION_CAP}"
        ));
    }
    if !(power > 0.0) {
        return config(format!("power must be positive, got {power}"));
    }

    let mut tables: Vec<SubsetTable> = (0..t_count)
        .map(|_| SubsetTable { users: Vec::new(), by_beam: Vec::new(), restricted: false })
        .collect();
    for c in &cqi {
        let tab = &mut tables[c.subset];
        tab.users.push(c);
        tab.restricted |= c.serve_only.is_some();
    }
    for tab in &mut tables {
        let n = tab.users.len();
        tab.by_beam = vec![0.0; m * n];
        for (i, u) in tab.users.iter().enumerate() {
            for q in 0..m {
                tab.by_beam[q * n + i] = u.values[q];
            }
        }
    }

    let mut best: Option<Best> = None;
    let mut best_mu = 0.0;
    let mut taken: Vec<bool> = Vec::new();
    let mut served: Vec<(usize, usize, f64)> = Vec::with_capacity(m);
    // prefix[d * n + i]: user i's sum over the first d beams of the combination
    let mut prefix: Vec<f64> = Vec::new();

    for (t, tab) in tables.iter().enumerate() {
        let n = tab.users.len();
        if n == 0 {
            continue;
        }
        taken.resize(n, false);
        for s in 1..=m {
            let inv_beam_power = s as f64 / power;
            let mut combo: Vec<usize> = (0..s).collect();
            prefix.clear();
            prefix.resize((s + 1) * n, 0.0);
            let mut changed = 0;
            loop {
                for d in changed..s {
                    let row = &tab.by_beam[combo[d] * n..(combo[d] + 1) * n];
                    let (lo, hi) = prefix.split_at_mut((d + 1) * n);
                    for ((out, prev), v) in hi[..n].iter_mut().zip(&lo[d * n..]).zip(row) {
                        *out = prev + v;
                    }
                }
                let totals = &prefix[s * n..];
                taken.iter_mut().for_each(|x| *x = false);
                served.clear();
                let mut gain = 1.0;
                for &q in &combo {
                    let mut pick = 0;
                    let mut pick_g = f64::NEG_INFINITY;
                    for (i, &total) in totals.iter().enumerate() {
                        let g = tab.sinr(i, q, total, inv_beam_power);
                        if g > pick_g {
                            pick = i;
                            pick_g = g;
                        }
                    }
                    if taken[pick] {
                        if !options.resolve_conflicts {
                            break;
                        }
                        let mut alt: Option<(usize, f64)> = None;
                        for (i, &total) in totals.iter().enumerate() {
                            if taken[i] {
                                continue;
                            }
                            let g = tab.sinr(i, q, total, inv_beam_power);
                            if alt.is_none_or(|(_, b)| g > b) {
                                alt = Some((i, g));
                            }
                        }
                        match alt {
                            Some((i, g)) => {
                                pick = i;
                                pick_g = g;
                            }
                            None => break,
                        }
                    }
                    taken[pick] = true;
                    served.push((pick, q, pick_g));
                    gain *= 1.0 + pick_g;
                }
                let mu = gain.log2();
                if mu > best_mu {
                    best_mu = mu;
                    best = Some(Best { mu, subset: t, size: s, served: served.clone() });
                }
                match next_combination(&mut combo, m) {
                    Some(p) => changed = p,
                    None => break,
                }
            }
        }
    }

    let Some(best) = best else {
        return Ok(ScheduleDecision::empty(scheme, m));
    };
    let users = &tables[best.subset].users;
    let active: Vec<usize> = best.served.iter().map(|&(_, q, _)| q).collect();
    let truncated = active.len() < best.size;
    let beam_power = power / best.size as f64;

    let mut d = ScheduleDecision::empty(scheme, m);
    let mut flats = Vec::with_capacity(active.len());
    for &(i, q, g) in &best.served {
        let u = users[i];
        d.users.push(u.user);
        d.beams.push(Beam::Codebook(BeamIndex::new(best.subset, q, t_count)));
        d.powers.push(beam_power);
        // a stopped combination transmits fewer beams than it was scored with
        let g = if truncated { u.sinr_in_set(q, &active, 1.0 / beam_power) } else { g };
        d.predicted_sinrs.push(g);
        flats.push(codebook.flat(best.subset, q));
    }
    d.precoders = codebook.precoders(&flats);
    d.subset = Some(best.subset);
    d.objective = best.mu;
    Ok(d)
}

/// Advances `c` to the next `c.len()`-combination of `0..n` in
/// lexicographic order and returns the first position that changed.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> Option<usize> {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return Some(i);
        }
    }
    None
}
