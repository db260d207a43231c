use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::AngleRange;
use crate::error::{config, Error, Result};
use crate::feedback::CqiQuantizer;
use crate::metrics::{OverheadMode, MAX_OVERHEAD_STREAMS};
use crate::scheduler::{full_inr_search_size, FullInrMode, Scheme, FULL_INR_EXHAUSTIVE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fading {
    Iid,
    OneRing,
}

impl Fading {
    pub fn as_str(&self) -> &'static str {
        match self {
            Fading::Iid => "iid",
            Fading::OneRing => "one_ring",
        }
    }
}

/// Whether user geometry is redrawn every drop or fixed for the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryMode {
    #[default]
    PerDrop,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrModel {
    /// Every user has `sigma^2 = 1`.
    #[default]
    Homogeneous,
    /// Per-user SNR scale uniform in dB over `snr_range_db`.
    LogUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FullInrSearch {
    #[default]
    Greedy,
    Exhaustive,
    /// Exhaustive when under the cap, greedy otherwise.
    Auto,
}

/// One sweep definition. Every field maps to a key of the TOML config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    /// Base-station antennas.
    pub m: usize,
    /// User counts to sweep.
    pub k: Vec<usize>,
    /// Codebook subsets.
    #[serde(default = "default_t")]
    pub t: usize,
    /// Transmit SNR `P` in dB (noise power 1).
    pub snr_db: Vec<f64>,
    pub drops: usize,
    #[serde(default = "default_fading")]
    pub fading: Vec<Fading>,
    #[serde(default = "default_azimuth")]
    pub azimuth_deg: [f64; 2],
    /// Angular-spread ranges to sweep, one-ring only.
    #[serde(default = "default_spread")]
    pub spread_deg: Vec<[f64; 2]>,
    /// Antenna spacing in wavelengths.
    #[serde(default = "default_spacing")]
    pub antenna_spacing: f64,
    #[serde(default)]
    pub geometry_mode: GeometryMode,
    #[serde(default)]
    pub snr_model: SnrModel,
    #[serde(default = "default_snr_range")]
    pub snr_range_db: [f64; 2],
    /// CSIT error variances to sweep.
    #[serde(default = "default_err_var")]
    pub err_var: Vec<f64>,
    pub schemes: Vec<Scheme>,
    /// CQI bits per value; absent means unquantized.
    #[serde(default)]
    pub quantizer_bits: Option<u32>,
    #[serde(default = "default_quantizer_range")]
    pub quantizer_range_db: [f64; 2],
    #[serde(default = "default_gamma")]
    pub gamma_threshold: f64,
    #[serde(default = "default_eps_sus")]
    pub eps_sus: f64,
    #[serde(default)]
    pub full_inr_mode: FullInrSearch,
    #[serde(default)]
    pub resolve_conflicts: bool,
    #[serde(default)]
    pub overhead_mode: OverheadMode,
    #[serde(default = "default_pilot_threshold")]
    pub pilot_threshold_db: f64,
    #[serde(default)]
    pub base_seed: u64,
    /// Per-drop CSV path; the summary goes next to it.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_t() -> usize {
    2
}
fn default_fading() -> Vec<Fading> {
    vec![Fading::Iid]
}
fn default_azimuth() -> [f64; 2] {
    [-60.0, 60.0]
}
fn default_spread() -> Vec<[f64; 2]> {
    vec![[5.0, 20.0]]
}
fn default_spacing() -> f64 {
    0.5
}
fn default_snr_range() -> [f64; 2] {
    [0.0, 20.0]
}
fn default_err_var() -> Vec<f64> {
    vec![0.0]
}
fn default_quantizer_range() -> [f64; 2] {
    [-20.0, 25.0]
}
fn default_gamma() -> f64 {
    0.01
}
fn default_eps_sus() -> f64 {
    crate::scheduler::DEFAULT_EPS_SUS
}
fn default_pilot_threshold() -> f64 {
    -20.0
}

impl ExperimentConfig {
    /// A config with every optional key at its default.
    pub fn new(m: usize, k: Vec<usize>, snr_db: Vec<f64>, drops: usize, schemes: Vec<Scheme>) -> Self {
        Self {
            name: String::new(),
            m,
            k,
            t: default_t(),
            snr_db,
            drops,
            fading: default_fading(),
            azimuth_deg: default_azimuth(),
            spread_deg: default_spread(),
            antenna_spacing: default_spacing(),
            geometry_mode: GeometryMode::default(),
            snr_model: SnrModel::default(),
            snr_range_db: default_snr_range(),
            err_var: default_err_var(),
            schemes,
            quantizer_bits: None,
            quantizer_range_db: default_quantizer_range(),
            gamma_threshold: default_gamma(),
            eps_sus: default_eps_sus(),
            full_inr_mode: FullInrSearch::default(),
            resolve_conflicts: false,
            overhead_mode: OverheadMode::default(),
            pilot_threshold_db: default_pilot_threshold(),
            base_seed: 0,
            output: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml_string()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.t == 0 {
            return config("m and t must be at least 1");
        }
        if self.drops == 0 {
            return config("drops must be at least 1");
        }
        if self.k.is_empty() || self.k.contains(&0) {
            return config("k grid must be non-empty with positive entries");
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|x| !x.is_finite()) {
            return config("snr_db grid must be non-empty and finite");
        }
        if self.schemes.is_empty() {
            return config("schemes must be non-empty");
        }
        if self.fading.is_empty() {
            return config("fading list must be non-empty");
        }
        if self.fading.contains(&Fading::OneRing) && self.spread_deg.is_empty() {
            return config("one-ring fading needs at least one spread range");
        }
        if self.err_var.is_empty() || self.err_var.iter().any(|e| !(0.0..1.0).contains(e)) {
            return config("err_var grid must be non-empty with values in [0, 1)");
        }
        AngleRange::from_degrees(self.azimuth_deg[0], self.azimuth_deg[1])?;
        if self.azimuth_deg[0] < -90.0 || self.azimuth_deg[1] > 90.0 {
            return config("azimuth_deg must lie within [-90, 90]");
        }
        for s in &self.spread_deg {
            AngleRange::from_degrees(s[0], s[1])?;
            if !(s[0] > 0.0) {
                return config("spread_deg ranges must be strictly positive");
            }
        }
        if !(self.antenna_spacing > 0.0) {
            return config("antenna_spacing must be positive");
        }
        if self.snr_range_db[0] > self.snr_range_db[1] {
            return config("snr_range_db is empty");
        }
        if !(self.gamma_threshold > 0.0) || !(self.eps_sus > 0.0) {
            return config("gamma_threshold and eps_sus must be positive");
        }
        let streams = self.k.iter().map(|&k| k.min(self.m)).max().unwrap_or(0);
        if self.overhead_mode != OverheadMode::Off
            && streams > MAX_OVERHEAD_STREAMS
            && self.schemes.iter().any(|s| !s.uses_inr_feedback())
        {
            return config(format!(
                "no-INR overhead factors cover at most {MAX_OVERHEAD_STREAMS} streams; set overhead_mode = \"off\""
            ));
        }
        self.quantizer()?;
        Ok(())
    }

    pub fn quantizer(&self) -> Result<CqiQuantizer> {
        match self.quantizer_bits {
            None => Ok(CqiQuantizer::passthrough()),
            Some(b) => CqiQuantizer::new(b, (self.quantizer_range_db[0], self.quantizer_range_db[1])),
        }
    }

    /// Full-INR search actually used at this `(M, T)`.
    pub fn resolved_full_inr_mode(&self) -> FullInrMode {
        match self.full_inr_mode {
            FullInrSearch::Greedy => FullInrMode::Greedy,
            FullInrSearch::Exhaustive => FullInrMode::Exhaustive,
            FullInrSearch::Auto if full_inr_search_size(self.m, self.t) <= FULL_INR_EXHAUSTIVE_CAP => {
                FullInrMode::Exhaustive
            }
            FullInrSearch::Auto => FullInrMode::Greedy,
        }
    }

    /// Every grid point in sweep order: fading, spread, CSIT error, SNR, K.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &fading in &self.fading {
            let spreads: Vec<Option<[f64; 2]>> = match fading {
                Fading::Iid => vec![None],
                Fading::OneRing => self.spread_deg.iter().copied().map(Some).collect(),
            };
            for spread in spreads {
                for &err_var in &self.err_var {
                    for &snr_db in &self.snr_db {
                        for &k in &self.k {
                            out.push(GridPoint { fading, spread_deg: spread, err_var, snr_db, k });
                        }
                    }
                }
            }
        }
        out
    }
}

/// One combination of swept parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub fading: Fading,
    pub spread_deg: Option<[f64; 2]>,
    pub err_var: f64,
    pub snr_db: f64,
    pub k: usize,
}

impl GridPoint {
    pub fn power(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }
}
