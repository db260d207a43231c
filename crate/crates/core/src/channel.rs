//! User drops, one-ring transmit correlation, Rayleigh fading and noisy CSIT.
//!
//! Angles are radians throughout this module; configs convert from degrees
//! with [`AngleRange::from_degrees`].

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{config, Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_map, max_hermitian_defect};
use crate::quadrature::one_ring_rule;
use crate::rng::{complex_gaussian, rng_from_seed};
use crate::{CMatrix, C64};

/// Pre-repair tolerance on the smallest eigenvalue of a correlation matrix.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Eigenvalues below this fraction of the largest are zeroed in the square root.
const EIGEN_ROUNDOFF: f64 = 1e-13;

/// Closed interval `[lo, hi]` in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleRange {
    pub lo: f64,
    pub hi: f64,
}

impl AngleRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return config(format!("empty angle range [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    pub fn from_degrees(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo.to_radians(), hi.to_radians())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.lo + (self.hi - self.lo) * u
    }
}

/// Large-scale parameters of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserGeometry {
    /// Azimuth of the user seen from the array broadside.
    pub azimuth_theta: f64,
    /// Half-angle of the scattering ring.
    pub angular_spread_delta: f64,
    /// Received-SNR scale; the noise power is `1 / snr_linear`.
    pub snr_linear: f64,
}

impl UserGeometry {
    pub fn new(azimuth_theta: f64, angular_spread_delta: f64, snr_linear: f64) -> Result<Self> {
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&azimuth_theta) {
            return config(format!("azimuth {azimuth_theta} rad outside [-pi/2, pi/2]"));
        }
        if !(angular_spread_delta > 0.0) {
            return config(format!("angular spread must be positive, got {angular_spread_delta}"));
        }
        if !(snr_linear > 0.0 && snr_linear.is_finite()) {
            return config(format!("snr scale must be positive, got {snr_linear}"));
        }
        Ok(Self { azimuth_theta, angular_spread_delta, snr_linear })
    }

    pub fn noise_power(&self) -> f64 {
        1.0 / self.snr_linear
    }
}

/// Draws `count` users i.i.d. uniform over the azimuth and spread ranges,
/// with unit SNR scale.
pub fn drop_users(
    count: usize,
    azimuth: AngleRange,
    spread: AngleRange,
    rng_seed: u64,
) -> Result<Vec<UserGeometry>> {
    if count == 0 {
        return config("user count must be at least 1");
    }
    if azimuth.lo < -FRAC_PI_2 || azimuth.hi > FRAC_PI_2 {
        return config("azimuth range must lie within [-90, 90] degrees");
    }
    if !(spread.lo > 0.0) {
        return config("angular spread range must be strictly positive");
    }
    let mut rng = rng_from_seed(rng_seed);
    (0..count)
        .map(|_| {
            let theta = azimuth.sample(&mut rng);
            let delta = spread.sample(&mut rng);
            UserGeometry::new(theta, delta, 1.0)
        })
        .collect()
}

/// Assigns per-user SNR scales drawn uniformly in dB over `db_range`
/// (log-uniform in linear scale).
pub fn draw_snrs(users: &mut [UserGeometry], db_range: (f64, f64), rng_seed: u64) -> Result<()> {
    let (lo, hi) = db_range;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return config(format!("empty SNR range [{lo}, {hi}] dB"));
    }
    let mut rng = rng_from_seed(rng_seed);
    for u in users.iter_mut() {
        let x: f64 = rng.random();
        u.snr_linear = 10f64.powf((lo + (hi - lo) * x) / 10.0);
    }
    Ok(())
}

/// Transmit correlation matrix of a ULA.
///
/// `entries` holds the defining values exactly (Hermitian, unit diagonal).
/// Negative eigenvalues from quadrature round-off are clipped when the
/// coloring factor is formed; [`CorrelationMatrix::repaired`] exposes the
/// clipped matrix.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: CMatrix,
    antenna_spacing_d: f64,
    min_eigenvalue: f64,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    sqrt: CMatrix,
}

impl CorrelationMatrix {
    /// Validates and factors a correlation matrix.
    pub fn from_entries(entries: CMatrix, antenna_spacing_d: f64) -> Result<Self> {
        let m = entries.nrows();
        if m == 0 || entries.ncols() != m {
            return Err(Error::Numerical(format!(
                "correlation matrix must be square and non-empty, got {}x{}",
                m,
                entries.ncols()
            )));
        }
        if max_hermitian_defect(&entries) > 1e-12 {
            return Err(Error::Numerical("correlation matrix is not Hermitian".into()));
        }
        if (0..m).any(|p| (entries[(p, p)] - C64::new(1.0, 0.0)).norm() > 1e-10) {
            return Err(Error::Numerical("correlation matrix diagonal is not unit".into()));
        }
        let (eigenvalues, eigenvectors) = hermitian_eigen(&entries);
        let min_eigenvalue = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -PSD_TOLERANCE {
            return Err(Error::Numerical(format!(
                "correlation matrix not PSD: min eigenvalue {min_eigenvalue:e}"
            )));
        }
        // Eigenvalues at round-off level are treated as zero so rank-deficient
        // matrices color along their true range.
        let floor = EIGEN_ROUNDOFF * eigenvalues.iter().cloned().fold(0.0, f64::max);
        let sqrt = hermitian_map(&eigenvalues, &eigenvectors, |l| if l > floor { l.sqrt() } else { 0.0 });
        Ok(Self { entries, antenna_spacing_d, min_eigenvalue, eigenvalues, eigenvectors, sqrt })
    }

    pub fn identity(m: usize) -> Self {
        Self::from_entries(CMatrix::identity(m, m), 0.5).expect("identity is a valid correlation")
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn antenna_spacing(&self) -> f64 {
        self.antenna_spacing_d
    }

    /// Smallest eigenvalue before clipping.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// The matrix with negative eigenvalues clipped to zero.
    pub fn repaired(&self) -> CMatrix {
        hermitian_map(&self.eigenvalues, &self.eigenvectors, |l| l.max(0.0))
    }

    /// Hermitian square root of the repaired matrix.
    pub fn sqrt(&self) -> &CMatrix {
        &self.sqrt
    }
}

/// One-ring correlation of an `m`-element ULA with spacing `antenna_spacing_d`
/// wavelengths, averaged over the scattering ring with 64-node Gauss-Legendre.
pub fn one_ring_correlation(
    geometry: &UserGeometry,
    m: usize,
    antenna_spacing_d: f64,
) -> Result<CorrelationMatrix> {
    if m == 0 {
        return config("antenna count must be at least 1");
    }
    if !(antenna_spacing_d > 0.0) {
        return config(format!("antenna spacing must be positive, got {antenna_spacing_d}"));
    }
    let (nodes, weights) = one_ring_rule();
    let delta = geometry.angular_spread_delta;
    let theta = geometry.azimuth_theta;
    // sin(alpha + theta) at each node; shared by every antenna pair.
    let sines: Vec<f64> = nodes.iter().map(|x| (delta * x + theta).sin()).collect();

    let mut r = CMatrix::identity(m, m);
    for lag in 1..m {
        let k = 2.0 * PI * antenna_spacing_d * lag as f64;
        let mut acc = C64::new(0.0, 0.0);
        for (s, w) in sines.iter().zip(weights) {
            acc += C64::from_polar(*w, k * s);
        }
        let v = acc * 0.5;
        for p in lag..m {
            r[(p, p - lag)] = v;
            r[(p - lag, p)] = v.conj();
        }
    }
    CorrelationMatrix::from_entries(r, antenna_spacing_d)
}

/// Spatial statistics of the users' channels.
#[derive(Debug, Clone)]
pub enum Correlation {
    /// i.i.d. Rayleigh, `R = I`.
    Iid { m: usize },
    /// One correlation matrix per user.
    PerUser(Vec<CorrelationMatrix>),
}

impl Correlation {
    pub fn antennas(&self) -> usize {
        match self {
            Correlation::Iid { m } => *m,
            Correlation::PerUser(rs) => rs.first().map_or(0, |r| r.dim()),
        }
    }
}

/// One fading realization plus the transmitter's view of it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `M x K`, column `k` is user `k`'s channel.
    pub h_true: CMatrix,
    /// Per-user noise power `sigma_k^2`.
    pub noise_power: Vec<f64>,
    /// Noisy estimate used for feedback and scheduling, if any.
    pub h_csit: Option<CMatrix>,
    pub err_var: f64,
}

impl ChannelRealization {
    pub fn antennas(&self) -> usize {
        self.h_true.nrows()
    }

    pub fn users(&self) -> usize {
        self.h_true.ncols()
    }

    /// Channel used for feedback and scheduling.
    pub fn csit(&self) -> &CMatrix {
        self.h_csit.as_ref().unwrap_or(&self.h_true)
    }
}

/// Draws `h_k = R_k^{1/2} g_k` with `g_k ~ CN(0, I)` for every user.
///
/// The user count is `noise_power.len()`.
pub fn gen_channel(
    correlation: &Correlation,
    noise_power: Vec<f64>,
    rng_seed: u64,
) -> Result<ChannelRealization> {
    let m = correlation.antennas();
    let k = noise_power.len();
    if m == 0 || k == 0 {
        return config("channel needs at least one antenna and one user");
    }
    if let Some(bad) = noise_power.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return config(format!("noise power must be positive, got {bad}"));
    }
    if let Correlation::PerUser(rs) = correlation {
        if rs.len() != k {
            return config(format!("{} correlation matrices for {} users", rs.len(), k));
        }
        if rs.iter().any(|r| r.dim() != m) {
            return config("correlation matrices disagree on antenna count");
        }
    }
    let mut rng = rng_from_seed(rng_seed);
    let g = CMatrix::from_fn(m, k, |_, _| complex_gaussian(&mut rng));
    let h_true = match correlation {
        Correlation::Iid { .. } => g,
        Correlation::PerUser(rs) => {
            let mut h = CMatrix::zeros(m, k);
            for (col, r) in rs.iter().enumerate() {
                h.set_column(col, &(r.sqrt() * g.column(col)));
            }
            h
        }
    };
    Ok(ChannelRealization { h_true, noise_power, h_csit: None, err_var: 0.0 })
}

/// Adds transmitter-side estimation error:
/// `h_csit = sqrt(1 - err_var) h + sqrt(err_var) n`, `n ~ CN(0, I)`.
pub fn add_csit_noise(
    realization: &ChannelRealization,
    err_var: f64,
    rng_seed: u64,
) -> Result<ChannelRealization> {
    if !(0.0..1.0).contains(&err_var) {
        return config(format!("CSIT error variance must lie in [0, 1), got {err_var}"));
    }
    let mut out = realization.clone();
    out.err_var = err_var;
    if err_var == 0.0 {
        out.h_csit = Some(realization.h_true.clone());
        return Ok(out);
    }
    let mut rng = rng_from_seed(rng_seed);
    let a = (1.0 - err_var).sqrt();
    let b = err_var.sqrt();
    let h = &realization.h_true;
    out.h_csit = Some(CMatrix::from_fn(h.nrows(), h.ncols(), |p, q| {
        h[(p, q)] * a + complex_gaussian(&mut rng) * b
    }));
    Ok(out)
}
