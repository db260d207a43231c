//! Truncated-DFT codebook and Haar-random beam sets.
//!
//! Vector `l = m * T + t` of an `(M, T)` codebook has entries
//! `exp(-j 2 pi l n / (M T)) / sqrt(M)` for `n = 0..M`. The `M` vectors that
//! share `t` form a unitary matrix (subset `t`); `m` indexes within it.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{config, Error, Result};
use crate::rng::{complex_gaussian, rng_from_seed};
use crate::{CMatrix, CVector, C64};

/// Position of a beam in the codebook, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeamIndex {
    pub subset_t: usize,
    pub within_m: usize,
    pub flat_l: usize,
}

impl BeamIndex {
    pub fn new(subset_t: usize, within_m: usize, num_subsets: usize) -> Self {
        debug_assert!(subset_t < num_subsets);
        Self { subset_t, within_m, flat_l: within_m * num_subsets + subset_t }
    }

    pub fn from_flat(flat_l: usize, num_subsets: usize) -> Self {
        Self { subset_t: flat_l % num_subsets, within_m: flat_l / num_subsets, flat_l }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    /// `M x MT`, column `l` is `c_l`.
    vectors: CMatrix,
    m: usize,
    t: usize,
}

/// Builds the `M T`-vector DFT codebook.
pub fn build_dft_codebook(m: usize, t: usize) -> Result<Codebook> {
    if m == 0 || t == 0 {
        return config(format!("codebook needs M >= 1 and T >= 1, got M={m}, T={t}"));
    }
    let size = m * t;
    let norm = 1.0 / (m as f64).sqrt();
    let vectors = CMatrix::from_fn(m, size, |n, l| {
        // reduce l*n mod MT first so the phase argument stays small
        let phase = -2.0 * PI * ((l * n) % size) as f64 / size as f64;
        C64::from_polar(norm, phase)
    });
    Ok(Codebook { vectors, m, t })
}

impl Codebook {
    pub fn antennas(&self) -> usize {
        self.m
    }

    pub fn num_subsets(&self) -> usize {
        self.t
    }

    pub fn size(&self) -> usize {
        self.m * self.t
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, flat_l: usize) -> CVector {
        self.vectors.column(flat_l).into_owned()
    }

    pub fn beam(&self, subset_t: usize, within_m: usize) -> BeamIndex {
        BeamIndex::new(subset_t, within_m, self.t)
    }

    /// Flat index of beam `within_m` of subset `subset_t`.
    pub fn flat(&self, subset_t: usize, within_m: usize) -> usize {
        within_m * self.t + subset_t
    }

    /// The `M` vectors of subset `t`, ordered by `m`.
    pub fn subset(&self, t: usize) -> Result<Vec<CVector>> {
        if t >= self.t {
            return Err(Error::Index { index: t, len: self.t });
        }
        Ok((0..self.m).map(|m| self.vector(self.flat(t, m))).collect())
    }

    /// `|h^H c_l|^2` for every flat index `l`.
    pub fn projections(&self, h: &CVector) -> Vec<f64> {
        self.vectors.ad_mul(h).iter().map(|z| z.norm_sqr()).collect()
    }

    /// `M x S` matrix with the given codebook columns.
    pub fn precoders(&self, flat: &[usize]) -> CMatrix {
        CMatrix::from_fn(self.m, flat.len(), |n, j| self.vectors[(n, flat[j])])
    }

    /// Writes `flat_l,t,m,antenna,real,imag` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["flat_l", "t", "m", "antenna", "real", "imag"])?;
        for l in 0..self.size() {
            let b = BeamIndex::from_flat(l, self.t);
            for n in 0..self.m {
                let z = self.vectors[(n, l)];
                w.write_record([
                    l.to_string(),
                    b.subset_t.to_string(),
                    b.within_m.to_string(),
                    n.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Haar-distributed `M x M` unitary matrix: QR of a complex Gaussian matrix
/// with the phases of `R`'s diagonal moved into `Q`.
pub fn build_random_unitary(m: usize, rng_seed: u64) -> Result<CMatrix> {
    if m == 0 {
        return config("random beam set needs M >= 1");
    }
    let mut rng = rng_from_seed(rng_seed);
    let g = CMatrix::from_fn(m, m, |_, _| complex_gaussian(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}
