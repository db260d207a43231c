//! Monte Carlo simulator for codebook-based limited-feedback multiuser MIMO
//! downlink.
//!
//! The crate models a base station with `M` antennas serving `K`
//! single-antenna users through a truncated-DFT codebook. Users report one
//! of several CQI formats (best-beam SINR, per-beam INR for every beam or
//! for one unitary subset, or thresholded one-bit INR), and the schedulers
//! in [`scheduler`] turn those reports into a set of served users and beams.
//! Baselines (random beamforming, zero-forcing with semi-orthogonal user
//! selection) run on the same channel draws so schemes are compared on
//! paired samples.
//!
//! Module map:
//!
//! - [`channel`]: user drops, one-ring transmit correlation, Rayleigh
//!   fading and noisy CSIT.
//! - [`codebook`]: DFT codebook with unitary subsets, Haar beam sets.
//! - [`feedback`]: per-user uplink reports and CQI quantization.
//! - [`scheduler`]: SINR reconstruction from INRs and every user-selection
//!   algorithm, plus dedicated-pilot grouping.
//! - [`metrics`]: realized SINR, sum rate and pilot-overhead factors.
//! - [`analysis`]: closed-form multiuser-diversity scaling expressions.
//! - [`harness`]: experiment configs, presets and seeded sweeps.

pub mod analysis;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod feedback;
pub mod harness;
mod linalg;
pub mod metrics;
mod quadrature;
pub mod rng;
pub mod scheduler;

pub use error::{Error, Result};

/// Complex baseband sample.
pub type C64 = num_complex::Complex<f64>;
/// Column-major complex matrix; channels are stored `M x K`.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Complex column vector.
pub type CVector = nalgebra::DVector<C64>;
