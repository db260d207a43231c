//! Realized performance on the true channel.

use serde::{Deserialize, Serialize};

use crate::error::{config, contract, Error, Result};
use crate::scheduler::{PilotGrouping, ScheduleDecision, Scheme};
use crate::CMatrix;

/// How dedicated-pilot overhead is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverheadMode {
    /// `(11 - ceil(S/2)) / 14` without INR, `10/14` with INR.
    #[default]
    Fixed,
    /// INR schemes charge `(11 - symbols_used) / 14` from pilot grouping.
    Grouping,
    /// `kappa = 1`.
    Off,
}

/// Relative slack when comparing realized and predicted SINR in outage mode.
pub const OUTAGE_REL_TOL: f64 = 1e-9;

/// Largest stream count with a positive no-INR overhead factor.
pub const MAX_OVERHEAD_STREAMS: usize = 20;

/// Per-user SINR of a decision on channel `h`:
/// `p_i |h^H w_i|^2 / (sigma^2 + sum_{j != i} p_j |h^H w_j|^2)`.
pub fn exact_sinr(decision: &ScheduleDecision, h: &CMatrix, noise_power: &[f64]) -> Result<Vec<f64>> {
    let s = decision.len();
    if decision.precoders.ncols() != s || decision.powers.len() != s {
        return contract("decision precoders and powers disagree with its users");
    }
    if s > 0 && decision.precoders.nrows() != h.nrows() {
        return contract("precoder dimension differs from antenna count");
    }
    if noise_power.len() != h.ncols() {
        return contract("noise power length differs from user count");
    }
    Ok(decision
        .users
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let hk = h.column(k);
            let rx: Vec<f64> = (0..s)
                .map(|j| decision.powers[j] * hk.dotc(&decision.precoders.column(j)).norm_sqr())
                .collect();
            let interference: f64 = rx.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x).sum();
            rx[i] / (noise_power[k] + interference)
        })
        .collect())
}

/// `sum log2(1 + gamma)`.
pub fn sum_rate(sinrs: &[f64]) -> f64 {
    sinrs.iter().map(|g| (1.0 + g).log2()).sum()
}

/// Rate when each user is sent at its predicted rate and decodes only if the
/// realized SINR reaches the prediction.
pub fn outage_sum_rate(predicted: &[f64], realized: &[f64]) -> f64 {
    predicted
        .iter()
        .zip(realized)
        .filter(|(p, r)| **r >= **p * (1.0 - OUTAGE_REL_TOL))
        .map(|(p, _)| (1.0 + p).log2())
        .sum()
}

/// Fraction of the 14 OFDM symbols left for data after pilots and control.
pub fn overhead_factor(
    scheme: Scheme,
    s: usize,
    max_streams: usize,
    grouping: Option<&PilotGrouping>,
    mode: OverheadMode,
) -> Result<f64> {
    if s == 0 || s > max_streams {
        return contract(format!("stream count {s} outside 1..={max_streams}"));
    }
    Ok(match mode {
        OverheadMode::Off => 1.0,
        _ if !scheme.uses_inr_feedback() && s > MAX_OVERHEAD_STREAMS => {
            return Err(Error::Domain(format!("no-INR overhead factor undefined for {s} streams")));
        }
        _ if !scheme.uses_inr_feedback() => (11 - s.div_ceil(2)) as f64 / 14.0,
        OverheadMode::Grouping => match grouping {
            Some(g) => (11 - g.symbols_used.min(8)) as f64 / 14.0,
            None => 10.0 / 14.0,
        },
        OverheadMode::Fixed => 10.0 / 14.0,
    })
}

/// `kappa * rate`.
pub fn adjusted_throughput(sum_rate_raw: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return config(format!("overhead factor must lie in (0, 1], got {kappa}"));
    }
    Ok(kappa * sum_rate_raw)
}

/// Outcome of one scheme on one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub scheme: Scheme,
    pub s: usize,
    pub sum_rate_raw: f64,
    pub overhead_factor: f64,
    pub sum_rate_adjusted: f64,
    pub sum_rate_outage: f64,
    pub predicted_sum_rate: f64,
    pub realized_sinrs: Vec<f64>,
}

impl DropResult {
    /// Evaluates `decision` on the true channel with overhead factor `kappa`.
    pub fn evaluate(decision: &ScheduleDecision, h_true: &CMatrix, noise_power: &[f64], kappa: f64) -> Result<Self> {
        let realized = exact_sinr(decision, h_true, noise_power)?;
        let raw = sum_rate(&realized);
        Ok(Self {
            scheme: decision.scheme,
            s: decision.len(),
            sum_rate_raw: raw,
            overhead_factor: kappa,
            sum_rate_adjusted: adjusted_throughput(raw, kappa)?,
            sum_rate_outage: outage_sum_rate(&decision.predicted_sinrs, &realized),
            predicted_sum_rate: decision.predicted_sum_rate(),
            realized_sinrs: realized,
        })
    }
}
