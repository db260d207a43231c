//! User selection for every feedback scheme.
//!
//! All schedulers are deterministic: ties go to the smallest user index,
//! then the smallest flat beam index, then the earliest candidate in
//! enumeration order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codebook::BeamIndex;
use crate::error::{contract, Error, Result};
use crate::CMatrix;

mod assignment;
mod dft_sinr;
mod full_inr;
mod partial_inr;
mod pilot;
mod rbf;
mod sinr;
mod zfbf;

pub use dft_sinr::schedule_dft_sinr;
pub use full_inr::{full_inr_search_size, schedule_full_inr, FullInrMode, FULL_INR_EXHAUSTIVE_CAP};
pub use partial_inr::{
    partial_inr_enumeration_size, schedule_one_bit_inr, schedule_partial_inr, PartialInrOptions,
    PARTIAL_INR_ENUMERATION_CAP,
};
pub use pilot::{decision_inr_table, pilot_grouping, PilotGrouping};
pub use rbf::{rbf_sinr_table, schedule_rbf};
pub use sinr::sinr_from_inrs;
pub use zfbf::{schedule_zfbf_sus, DEFAULT_EPS_SUS};

pub(crate) use assignment::max_weight_assignment;
pub(crate) use sinr::sinr_with_beam_power;

/// Transmission scheme under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ZfbfSus,
    FullInr,
    PartialInr,
    DftSinr,
    Rbf,
    OneBitInr,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::ZfbfSus,
        Scheme::FullInr,
        Scheme::PartialInr,
        Scheme::DftSinr,
        Scheme::Rbf,
        Scheme::OneBitInr,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::ZfbfSus => "zfbf_sus",
            Scheme::FullInr => "full_inr",
            Scheme::PartialInr => "partial_inr",
            Scheme::DftSinr => "dft_sinr",
            Scheme::Rbf => "rbf",
            Scheme::OneBitInr => "one_bit_inr",
        }
    }

    /// Whether the scheme feeds back INRs (and so can group dedicated pilots).
    pub fn uses_inr_feedback(&self) -> bool {
        matches!(self, Scheme::FullInr | Scheme::PartialInr | Scheme::OneBitInr)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme '{s}'")))
    }
}

/// Beam carried by one scheduled stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beam {
    /// A codebook vector.
    Codebook(BeamIndex),
    /// Column of a scheme-specific precoding matrix (random beams, ZF).
    Column(usize),
}

impl Beam {
    /// Integer used in CSV output: the flat index or the column index.
    pub fn id(&self) -> usize {
        match self {
            Beam::Codebook(b) => b.flat_l,
            Beam::Column(c) => *c,
        }
    }
}

/// Users, beams and powers chosen for one scheduling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDecision {
    pub scheme: Scheme,
    pub users: Vec<usize>,
    pub beams: Vec<Beam>,
    /// `M x S`, unit-norm column `i` serves `users[i]`.
    pub precoders: CMatrix,
    pub powers: Vec<f64>,
    /// The scheduler's SINR estimate for each served user.
    pub predicted_sinrs: Vec<f64>,
    /// Common codebook subset, for schemes restricted to one.
    pub subset: Option<usize>,
    /// Value of the scheduler's selection metric for the chosen candidate.
    pub objective: f64,
}

impl ScheduleDecision {
    pub fn empty(scheme: Scheme, antennas: usize) -> Self {
        Self {
            scheme,
            users: Vec::new(),
            beams: Vec::new(),
            precoders: CMatrix::zeros(antennas, 0),
            powers: Vec::new(),
            predicted_sinrs: Vec::new(),
            subset: None,
            objective: 0.0,
        }
    }

    /// Number of served users `S`.
    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    /// `sum log2(1 + predicted SINR)` in bits/s/Hz.
    pub fn predicted_sum_rate(&self) -> f64 {
        self.predicted_sinrs.iter().map(|g| (1.0 + g).log2()).sum()
    }

    /// Checks the structural invariants every scheduler must meet.
    pub fn validate(&self, total_power: f64, max_streams: usize) -> Result<()> {
        let s = self.users.len();
        if self.beams.len() != s
            || self.powers.len() != s
            || self.predicted_sinrs.len() != s
            || self.precoders.ncols() != s
        {
            return contract("decision vectors disagree in length");
        }
        if s > max_streams {
            return contract(format!("{s} streams exceed limit {max_streams}"));
        }
        let p: f64 = self.powers.iter().sum();
        if p > total_power + 1e-9 {
            return contract(format!("power {p} exceeds budget {total_power}"));
        }
        for (i, u) in self.users.iter().enumerate() {
            if self.users[..i].contains(u) {
                return contract(format!("user {u} scheduled twice"));
            }
            if self.beams[..i].contains(&self.beams[i]) {
                return contract(format!("beam {:?} used twice", self.beams[i]));
            }
            if (self.precoders.column(i).norm() - 1.0).abs() > 1e-9 {
                return contract("precoder is not unit norm");
            }
        }
        if let Some(t) = self.subset {
            let same = self.beams.iter().all(|b| matches!(b, Beam::Codebook(x) if x.subset_t == t));
            if !same {
                return contract("beams leave the decision's subset");
            }
        }
        Ok(())
    }
}
