//! Experiment configs, presets and seeded sweeps.
//!
//! Every drop draws its channel from substreams keyed by `(base_seed,
//! drop)`, so all schemes, user counts and CSIT-error levels see paired
//! channels and a rerun reproduces the same bytes.

mod config;
mod output;
mod preset;
mod sweep;

pub use config::{ExperimentConfig, Fading, FullInrSearch, GeometryMode, GridPoint, SnrModel};
pub use output::{
    summary_path, write_rows_csv, write_run_files, write_summary_csv, ROW_CSV_HEADER, SCHEMA_VERSION,
    SUMMARY_CSV_HEADER,
};
pub use preset::{preset, PRESET_DROPS, PRESET_NAMES};
pub use sweep::{run_sweep, summarize, DropRow, RunRecord, Stat, SummaryRow, SweepContext};
