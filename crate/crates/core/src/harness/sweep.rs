use rayon::prelude::*;

use crate::channel::{
    add_csit_noise, draw_snrs, drop_users, gen_channel, one_ring_correlation, AngleRange, ChannelRealization,
    Correlation,
};
use crate::codebook::{build_dft_codebook, build_random_unitary, Codebook};
use crate::error::{contract, Result};
use crate::feedback::{
    compute_full_inr, compute_one_bit_inr, compute_partial_inr, compute_sinr_report, quantize_cqi, CqiQuantizer,
    FeedbackReport,
};
use crate::metrics::{overhead_factor, DropResult, OverheadMode};
use crate::rng::{substream, Stream, FIXED_DROP};
use crate::scheduler::{
    decision_inr_table, pilot_grouping, schedule_dft_sinr, schedule_full_inr, schedule_one_bit_inr,
    schedule_partial_inr, schedule_rbf, schedule_zfbf_sus, FullInrMode, PartialInrOptions, ScheduleDecision,
    Scheme,
};

use super::config::{ExperimentConfig, Fading, GeometryMode, GridPoint, SnrModel};

/// Overhead factor charged when nothing is scheduled: no dedicated pilots.
const EMPTY_SCHEDULE_KAPPA: f64 = 11.0 / 14.0;

/// One scheme on one drop at one grid point.
#[derive(Debug, Clone)]
pub struct DropRow {
    pub point: GridPoint,
    pub drop: u64,
    pub decision: ScheduleDecision,
    pub result: DropResult,
}

/// Mean and standard error of one metric over the drops of a grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self { mean: f64::NAN, se: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n;
        if values.len() < 2 {
            return Self { mean, se: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self { mean, se: (var / n).sqrt() }
    }
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub point: GridPoint,
    pub scheme: Scheme,
    pub drops: usize,
    pub mean_s: f64,
    pub raw: Stat,
    pub adjusted: Stat,
    pub outage: Stat,
}

/// Everything a sweep produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub rows: Vec<DropRow>,
    pub summary: Vec<SummaryRow>,
}

/// Shared, read-only state for every drop of a sweep.
pub struct SweepContext<'a> {
    config: &'a ExperimentConfig,
    codebook: Codebook,
    quantizer: CqiQuantizer,
    full_mode: FullInrMode,
}

impl<'a> SweepContext<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            codebook: build_dft_codebook(config.m, config.t)?,
            quantizer: config.quantizer()?,
            full_mode: config.resolved_full_inr_mode(),
        })
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// Channel of drop `drop` at `point`; identical for every scheme.
    pub fn channel(&self, point: &GridPoint, drop: u64) -> Result<ChannelRealization> {
        let c = self.config;
        let geo_drop = match c.geometry_mode {
            GeometryMode::PerDrop => drop,
            GeometryMode::Fixed => FIXED_DROP,
        };
        let spread = point.spread_deg.or_else(|| c.spread_deg.first().copied()).unwrap_or([5.0, 20.0]);
        let mut users = drop_users(
            point.k,
            AngleRange::from_degrees(c.azimuth_deg[0], c.azimuth_deg[1])?,
            AngleRange::from_degrees(spread[0], spread[1])?,
            substream(c.base_seed, geo_drop, Stream::Geometry),
        )?;
        if c.snr_model == SnrModel::LogUniform {
            draw_snrs(
                &mut users,
                (c.snr_range_db[0], c.snr_range_db[1]),
                substream(c.base_seed, geo_drop, Stream::Snr),
            )?;
        }
        let correlation = match point.fading {
            Fading::Iid => Correlation::Iid { m: c.m },
            Fading::OneRing => Correlation::PerUser(
                users
                    .iter()
                    .map(|u| one_ring_correlation(u, c.m, c.antenna_spacing))
                    .collect::<Result<_>>()?,
            ),
        };
        let noise = users.iter().map(|u| u.noise_power()).collect();
        let real = gen_channel(&correlation, noise, substream(c.base_seed, drop, Stream::Channel))?;
        add_csit_noise(&real, point.err_var, substream(c.base_seed, drop, Stream::Csit))
    }

    /// Feedback and scheduling for one scheme, all from `h_csit`.
    pub fn schedule(&self, scheme: Scheme, channel: &ChannelRealization, power: f64, drop: u64) -> Result<ScheduleDecision> {
        let cb = &self.codebook;
        let h = channel.csit();
        let users = 0..channel.users();
        let col = |k: usize| h.column(k).into_owned();
        let noise = &channel.noise_power;
        let opts = PartialInrOptions { resolve_conflicts: self.config.resolve_conflicts };
        match scheme {
            Scheme::ZfbfSus => schedule_zfbf_sus(channel, power, self.config.eps_sus),
            Scheme::Rbf => {
                let beams = build_random_unitary(self.config.m, substream(self.config.base_seed, drop, Stream::RbfBeams))?;
                schedule_rbf(channel, &beams, power)
            }
            Scheme::DftSinr => {
                let reports: Vec<_> = users
                    .map(|k| {
                        let r = FeedbackReport::Sinr(compute_sinr_report(&col(k), noise[k], cb, power));
                        match self.quantize(r) {
                            FeedbackReport::Sinr(x) => x,
                            _ => unreachable!("quantizer keeps the report kind"),
                        }
                    })
                    .collect();
                Ok(schedule_dft_sinr(&reports, cb, power))
            }
            Scheme::FullInr => {
                let reports: Vec<_> = users
                    .map(|k| match self.quantize(FeedbackReport::FullInr(compute_full_inr(&col(k), noise[k], cb))) {
                        FeedbackReport::FullInr(x) => x,
                        _ => unreachable!("quantizer keeps the report kind"),
                    })
                    .collect();
                schedule_full_inr(&reports, cb, power, self.full_mode)
            }
            Scheme::PartialInr => {
                let reports: Vec<_> = users
                    .map(|k| match self.quantize(FeedbackReport::PartialInr(compute_partial_inr(&col(k), noise[k], cb))) {
                        FeedbackReport::PartialInr(x) => x,
                        _ => unreachable!("quantizer keeps the report kind"),
                    })
                    .collect();
                schedule_partial_inr(&reports, cb, power, opts)
            }
            Scheme::OneBitInr => {
                let mut reports = Vec::with_capacity(channel.users());
                for k in users {
                    let r = compute_one_bit_inr(&col(k), noise[k], cb, self.config.gamma_threshold)?;
                    match self.quantize(FeedbackReport::OneBitInr(r)) {
                        FeedbackReport::OneBitInr(x) => reports.push(x),
                        _ => unreachable!("quantizer keeps the report kind"),
                    }
                }
                schedule_one_bit_inr(&reports, cb, power, opts)
            }
        }
    }

    fn quantize(&self, r: FeedbackReport) -> FeedbackReport {
        if self.quantizer.is_passthrough() {
            r
        } else {
            quantize_cqi(&r, &self.quantizer)
        }
    }

    /// Overhead factor for a decision under the configured mode.
    pub fn overhead(&self, decision: &ScheduleDecision, channel: &ChannelRealization) -> Result<f64> {
        if decision.is_empty() {
            return Ok(EMPTY_SCHEDULE_KAPPA);
        }
        let max_streams = self.config.m.min(channel.users());
        let grouping = if self.config.overhead_mode == OverheadMode::Grouping && decision.scheme.uses_inr_feedback() {
            let table = decision_inr_table(decision, channel.csit(), &channel.noise_power);
            Some(pilot_grouping(decision, &table, self.config.pilot_threshold_db)?)
        } else {
            None
        };
        overhead_factor(decision.scheme, decision.len(), max_streams, grouping.as_ref(), self.config.overhead_mode)
    }

    /// Every configured scheme on drop `drop` at `point`, in config order.
    pub fn run_drop(&self, point: &GridPoint, drop: u64) -> Result<Vec<DropRow>> {
        let channel = self.channel(point, drop)?;
        let power = point.power();
        let max_streams = self.config.m.min(point.k);
        self.config
            .schemes
            .iter()
            .map(|&scheme| {
                let decision = self.schedule(scheme, &channel, power, drop)?;
                decision.validate(power, max_streams).or_else(|e| contract(format!("{scheme}: {e}")))?;
                let kappa = self.overhead(&decision, &channel)?;
                let result = DropResult::evaluate(&decision, &channel.h_true, &channel.noise_power, kappa)?;
                Ok(DropRow { point: *point, drop, decision, result })
            })
            .collect()
    }
}

/// Runs every grid point and drop of `config`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<RunRecord> {
    let ctx = SweepContext::new(config)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for point in config.grid() {
        let per_drop: Vec<Vec<DropRow>> = (0..config.drops as u64)
            .into_par_iter()
            .map(|d| ctx.run_drop(&point, d))
            .collect::<Result<_>>()?;
        let point_rows: Vec<DropRow> = per_drop.into_iter().flatten().collect();
        summary.extend(summarize(&point, &config.schemes, &point_rows));
        rows.extend(point_rows);
    }
    Ok(RunRecord { config: config.clone(), config_hash: config.hash()?, rows, summary })
}

/// Aggregates over the rows of one grid point.
pub fn summarize(point: &GridPoint, schemes: &[Scheme], rows: &[DropRow]) -> Vec<SummaryRow> {
    schemes
        .iter()
        .map(|&scheme| {
            let mine: Vec<&DropRow> = rows.iter().filter(|r| r.decision.scheme == scheme).collect();
            let pick = |f: fn(&DropResult) -> f64| mine.iter().map(|r| f(&r.result)).collect::<Vec<_>>();
            SummaryRow {
                point: *point,
                scheme,
                drops: mine.len(),
                mean_s: Stat::of(&mine.iter().map(|r| r.result.s as f64).collect::<Vec<_>>()).mean,
                raw: Stat::of(&pick(|r| r.sum_rate_raw)),
                adjusted: Stat::of(&pick(|r| r.sum_rate_adjusted)),
                outage: Stat::of(&pick(|r| r.sum_rate_outage)),
            }
        })
        .collect()
}
