//! Per-user uplink reports for the four CQI feedback schemes.
//!
//! All CQIs are linear ratios. The optional [`CqiQuantizer`] works on a
//! uniform dB grid and is the only place dB values appear.

use crate::codebook::{BeamIndex, Codebook};
use crate::error::{config, Error, Result};
use crate::CVector;

/// Best-beam SINR report (conventional CDI + CQI feedback).
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub beam: BeamIndex,
    pub sinr: f64,
}

/// INRs toward every codebook beam, indexed by flat beam index.
#[derive(Debug, Clone, PartialEq)]
pub struct FullInrReport {
    pub inrs: Vec<f64>,
}

/// INRs toward the `M` beams of one subset, plus the subset index.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialInrReport {
    pub subset_t: usize,
    pub inrs: Vec<f64>,
}

/// Best-beam SNR plus one interference bit per other beam of its subset.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBitInrReport {
    pub beam: BeamIndex,
    pub snr: f64,
    /// Bits for beams `m != beam.within_m` of the subset, in ascending `m`.
    pub bits: Vec<bool>,
}

impl OneBitInrReport {
    /// Interference bit toward beam `m` of the report's subset; `None` for
    /// the serving beam.
    pub fn bit(&self, m: usize) -> Option<bool> {
        let own = self.beam.within_m;
        match m.cmp(&own) {
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Less => self.bits.get(m).copied(),
            std::cmp::Ordering::Greater => self.bits.get(m - 1).copied(),
        }
    }
}

/// Any of the uplink payloads.
#[derive(Debug, Clone, PartialEq)]
pub enum FeedbackReport {
    Sinr(SinrReport),
    FullInr(FullInrReport),
    PartialInr(PartialInrReport),
    OneBitInr(OneBitInrReport),
}

impl FeedbackReport {
    pub fn tag(&self) -> &'static str {
        match self {
            FeedbackReport::Sinr(_) => "sinr",
            FeedbackReport::FullInr(_) => "full_inr",
            FeedbackReport::PartialInr(_) => "partial_inr",
            FeedbackReport::OneBitInr(_) => "one_bit_inr",
        }
    }

    /// Debug CSV record: `user,scheme,subset,beam,values,bits`.
    pub fn csv_record(&self, user: usize) -> [String; 6] {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        let (subset, beam, values, bits) = match self {
            FeedbackReport::Sinr(r) => (
                r.beam.subset_t.to_string(),
                r.beam.flat_l.to_string(),
                r.sinr.to_string(),
                String::new(),
            ),
            FeedbackReport::FullInr(r) => (String::new(), String::new(), join(&r.inrs), String::new()),
            FeedbackReport::PartialInr(r) => {
                (r.subset_t.to_string(), String::new(), join(&r.inrs), String::new())
            }
            FeedbackReport::OneBitInr(r) => (
                r.beam.subset_t.to_string(),
                r.beam.flat_l.to_string(),
                r.snr.to_string(),
                r.bits.iter().map(|b| if *b { '1' } else { '0' }).collect(),
            ),
        };
        [user.to_string(), self.tag().to_string(), subset, beam, values, bits]
    }
}

pub const REPORT_CSV_HEADER: [&str; 6] = ["user", "scheme", "subset", "beam", "values", "bits"];

/// Best-beam SINR assuming all `M` beams of a subset carry power `P / M`.
/// Ties go to the smallest flat index.
pub fn compute_sinr_report(h: &CVector, noise_power: f64, codebook: &Codebook, power: f64) -> SinrReport {
    let proj = codebook.projections(h);
    let m = codebook.antennas();
    let t_count = codebook.num_subsets();
    let offset = m as f64 / power * noise_power;
    let mut best: Option<SinrReport> = None;
    for l in 0..codebook.size() {
        let beam = BeamIndex::from_flat(l, t_count);
        let interference: f64 = (0..m)
            .filter(|&j| j != beam.within_m)
            .map(|j| proj[codebook.flat(beam.subset_t, j)])
            .sum();
        let sinr = proj[l] / (offset + interference);
        if best.as_ref().is_none_or(|b| sinr > b.sinr) {
            best = Some(SinrReport { beam, sinr });
        }
    }
    best.expect("codebook is non-empty")
}

/// `INR_l = |h^H c_l|^2 / sigma^2` for every codebook beam.
pub fn compute_full_inr(h: &CVector, noise_power: f64, codebook: &Codebook) -> FullInrReport {
    let inrs = codebook.projections(h).into_iter().map(|p| p / noise_power).collect();
    FullInrReport { inrs }
}

/// Subset holding the strongest single-beam projection (ties to smallest
/// `t`) and its `M` INRs.
pub fn compute_partial_inr(h: &CVector, noise_power: f64, codebook: &Codebook) -> PartialInrReport {
    let full = compute_full_inr(h, noise_power, codebook);
    partial_from_full(&full, codebook)
}

pub(crate) fn partial_from_full(full: &FullInrReport, codebook: &Codebook) -> PartialInrReport {
    let (m, t_count) = (codebook.antennas(), codebook.num_subsets());
    let mut best_t = 0;
    let mut best_v = f64::NEG_INFINITY;
    for t in 0..t_count {
        let v = (0..m).map(|j| full.inrs[codebook.flat(t, j)]).fold(f64::NEG_INFINITY, f64::max);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    PartialInrReport {
        subset_t: best_t,
        inrs: (0..m).map(|j| full.inrs[codebook.flat(best_t, j)]).collect(),
    }
}

/// One-bit INR report: strongest beam over the whole codebook, its SNR, and
/// `bit_j = INR_j / SNR >= threshold` for the other beams of its subset.
pub fn compute_one_bit_inr(
    h: &CVector,
    noise_power: f64,
    codebook: &Codebook,
    threshold: f64,
) -> Result<OneBitInrReport> {
    if !(threshold > 0.0) {
        return config(format!("one-bit threshold must be positive, got {threshold}"));
    }
    let full = compute_full_inr(h, noise_power, codebook);
    let mut best = 0;
    for l in 1..full.inrs.len() {
        if full.inrs[l] > full.inrs[best] {
            best = l;
        }
    }
    let snr = full.inrs[best];
    if !(snr > 0.0) {
        return Err(Error::Degenerate("zero channel has no serving beam".into()));
    }
    let beam = BeamIndex::from_flat(best, codebook.num_subsets());
    let bits = (0..codebook.antennas())
        .filter(|&j| j != beam.within_m)
        .map(|j| full.inrs[codebook.flat(beam.subset_t, j)] / snr >= threshold)
        .collect();
    Ok(OneBitInrReport { beam, snr, bits })
}

/// Uniform dB-grid quantizer for CQI values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqiQuantizer {
    /// `None` passes values through unchanged.
    bits: Option<u32>,
    lo_db: f64,
    hi_db: f64,
}

impl CqiQuantizer {
    pub fn passthrough() -> Self {
        Self { bits: None, lo_db: 0.0, hi_db: 0.0 }
    }

    pub fn new(bits_per_value: u32, db_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = db_range;
        if bits_per_value == 0 || bits_per_value > 24 {
            return config(format!("quantizer bits must be in 1..=24, got {bits_per_value}"));
        }
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return config(format!("empty quantizer range [{lo}, {hi}] dB"));
        }
        if lo == hi {
            return config("quantizer range must have positive width");
        }
        Ok(Self { bits: Some(bits_per_value), lo_db: lo, hi_db: hi })
    }

    pub fn is_passthrough(&self) -> bool {
        self.bits.is_none()
    }

    /// Nearest grid level in dB; values below the floor map to 0 linear,
    /// values above the top clamp to it, ties round toward the lower level.
    pub fn quantize_value(&self, value: f64) -> f64 {
        let Some(bits) = self.bits else { return value };
        if value.is_infinite() && value > 0.0 {
            return 10f64.powf(self.hi_db / 10.0);
        }
        if !(value > 0.0) {
            return 0.0;
        }
        let db = 10.0 * value.log10();
        if db < self.lo_db {
            return 0.0;
        }
        let levels = (1u64 << bits) - 1;
        let step = (self.hi_db - self.lo_db) / levels as f64;
        let idx = nearest_level((db - self.lo_db) / step, levels);
        let level_db = self.lo_db + idx as f64 * step;
        if level_db == db {
            value
        } else {
            10f64.powf(level_db / 10.0)
        }
    }
}

// Round half toward the lower level.
fn nearest_level(x: f64, levels: u64) -> u64 {
    ((x - 0.5).ceil().max(0.0) as u64).min(levels)
}

/// Applies the quantizer to every CQI value carried by `report`. Beam
/// indices and interference bits are untouched.
pub fn quantize_cqi(report: &FeedbackReport, quantizer: &CqiQuantizer) -> FeedbackReport {
    let q = |v: f64| quantizer.quantize_value(v);
    match report {
        FeedbackReport::Sinr(r) => FeedbackReport::Sinr(SinrReport { beam: r.beam, sinr: q(r.sinr) }),
        FeedbackReport::FullInr(r) => {
            FeedbackReport::FullInr(FullInrReport { inrs: r.inrs.iter().map(|v| q(*v)).collect() })
        }
        FeedbackReport::PartialInr(r) => FeedbackReport::PartialInr(PartialInrReport {
            subset_t: r.subset_t,
            inrs: r.inrs.iter().map(|v| q(*v)).collect(),
        }),
        FeedbackReport::OneBitInr(r) => FeedbackReport::OneBitInr(OneBitInrReport {
            beam: r.beam,
            snr: q(r.snr),
            bits: r.bits.clone(),
        }),
    }
}
