//! Desk-scale sweeps matching each figure's setup.
//!
//! Every preset uses 1000 drops per grid point and `T = 2`.

use crate::error::{config, Result};
use crate::metrics::OverheadMode;
use crate::scheduler::Scheme;

use super::config::{ExperimentConfig, Fading, FullInrSearch, SnrModel};

pub const PRESET_NAMES: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

pub const PRESET_DROPS: usize = 1000;

/// The config behind preset `name`.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    use Scheme::*;
    let codebook_schemes = vec![ZfbfSus, FullInr, PartialInr, DftSinr, Rbf];
    let mut c = match name {
        // rate vs SNR, i.i.d. fading
        "fig1" => {
            let mut c = ExperimentConfig::new(
                16,
                vec![20],
                vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
                PRESET_DROPS,
                vec![ZfbfSus, FullInr, PartialInr, Rbf],
            );
            c.fading = vec![Fading::Iid];
            c
        }
        "fig2" => {
            let mut c = ExperimentConfig::new(4, vec![4, 8, 12, 16, 20, 30, 40, 50], vec![10.0], PRESET_DROPS, codebook_schemes);
            c.fading = vec![Fading::OneRing, Fading::Iid];
            c.full_inr_mode = FullInrSearch::Exhaustive;
            c
        }
        "fig3" => {
            let mut c =
                ExperimentConfig::new(8, vec![8, 12, 16, 24, 32, 48, 64, 100], vec![10.0], PRESET_DROPS, codebook_schemes);
            c.fading = vec![Fading::OneRing, Fading::Iid];
            c
        }
        "fig4" => {
            let mut c = ExperimentConfig::new(16, vec![16, 20, 24, 32, 40, 60, 80], vec![10.0], PRESET_DROPS, codebook_schemes);
            c.fading = vec![Fading::OneRing];
            c
        }
        "fig5" => {
            let mut c =
                ExperimentConfig::new(8, vec![8, 16, 24, 32, 48, 64], vec![10.0], PRESET_DROPS, vec![ZfbfSus, PartialInr, DftSinr]);
            c.fading = vec![Fading::OneRing];
            c.spread_deg = vec![[5.0, 10.0], [10.0, 20.0], [20.0, 40.0]];
            c
        }
        "fig6" => {
            let mut c =
                ExperimentConfig::new(16, vec![16, 24, 32, 40], vec![10.0], PRESET_DROPS, vec![ZfbfSus, PartialInr, DftSinr]);
            c.fading = vec![Fading::OneRing];
            c.err_var = vec![0.0, 0.1, 0.2];
            c
        }
        "fig7" => {
            let mut c =
                ExperimentConfig::new(16, vec![8, 16, 24, 32, 40], vec![10.0], PRESET_DROPS, vec![ZfbfSus, PartialInr, DftSinr]);
            c.fading = vec![Fading::OneRing];
            c.err_var = vec![0.1];
            c.overhead_mode = OverheadMode::Fixed;
            c
        }
        "fig8" => {
            let mut c =
                ExperimentConfig::new(16, vec![16, 24, 32, 40], vec![10.0], PRESET_DROPS, vec![FullInr, PartialInr, OneBitInr]);
            c.fading = vec![Fading::OneRing];
            c.snr_model = SnrModel::LogUniform;
            c.err_var = vec![0.1];
            c.gamma_threshold = 0.02;
            c
        }
        _ => return config(format!("unknown preset '{name}', expected one of {}", PRESET_NAMES.join(", "))),
    };
    c.name = name.to_string();
    c.validate()?;
    Ok(c)
}
