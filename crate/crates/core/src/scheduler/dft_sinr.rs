use crate::codebook::{BeamIndex, Codebook};
use crate::feedback::SinrReport;

use super::{Beam, ScheduleDecision, Scheme};

/// Conventional CDI + SINR scheduling.
///
/// For every beam the strongest reporting user is kept; the subset with the
/// largest sum of reported rates wins. Each served beam keeps the `P / M`
/// power the users assumed, so reported SINRs are lower bounds whenever
/// fewer than `M` beams are served.
pub fn schedule_dft_sinr(reports: &[SinrReport], codebook: &Codebook, power: f64) -> ScheduleDecision {
    let m = codebook.antennas();
    let t_count = codebook.num_subsets();
    if reports.is_empty() {
        return ScheduleDecision::empty(Scheme::DftSinr, m);
    }
    // best[flat] = (user, sinr)
    let mut best: Vec<Option<(usize, f64)>> = vec![None; codebook.size()];
    for (k, r) in reports.iter().enumerate() {
        let slot = &mut best[r.beam.flat_l];
        if slot.is_none_or(|(_, g)| r.sinr > g) {
            *slot = Some((k, r.sinr));
        }
    }
    let subset_rate = |t: usize| -> f64 {
        (0..m)
            .filter_map(|j| best[codebook.flat(t, j)])
            .map(|(_, g)| (1.0 + g).log2())
            .sum()
    };
    let mut t_star = 0;
    let mut best_rate = f64::NEG_INFINITY;
    for t in 0..t_count {
        let r = subset_rate(t);
        if r > best_rate {
            best_rate = r;
            t_star = t;
        }
    }

    let mut d = ScheduleDecision::empty(Scheme::DftSinr, m);
    let mut flats = Vec::new();
    for j in 0..m {
        let flat = codebook.flat(t_star, j);
        if let Some((k, g)) = best[flat] {
            d.users.push(k);
            d.beams.push(Beam::Codebook(BeamIndex::new(t_star, j, t_count)));
            d.powers.push(power / m as f64);
            d.predicted_sinrs.push(g);
            flats.push(flat);
        }
    }
    d.precoders = codebook.precoders(&flats);
    d.subset = Some(t_star);
    d.objective = best_rate;
    d
}
