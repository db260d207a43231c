//! Asymptotic throughput expressions and the optimal stream-count predictor.
//!
//! All values are asymptotic: `o(1)` terms are dropped.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};

/// Logarithm used for every `log` in the scaling laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(&self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }

    fn from_ln(&self, ln_x: f64) -> f64 {
        match self {
            LogBase::Natural => ln_x,
            LogBase::Two => ln_x / std::f64::consts::LN_2,
            LogBase::Ten => ln_x / std::f64::consts::LN_10,
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "natural" | "ln" => Ok(LogBase::Natural),
            "2" | "two" => Ok(LogBase::Two),
            "10" | "ten" => Ok(LogBase::Ten),
            _ => config(format!("unknown log base '{s}'")),
        }
    }
}

/// Effective candidate count used inside the double logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingVariant {
    /// Single subset, `K` users.
    T1,
    /// Full INR feedback over `MT` beams, `K T` candidates.
    Full,
    /// Partial INR feedback, `K / T` users per subset.
    Partial,
}

impl ScalingVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingVariant::T1 => "t1",
            ScalingVariant::Full => "full",
            ScalingVariant::Partial => "partial",
        }
    }

    fn effective_users(&self, k: f64, t: f64) -> f64 {
        match self {
            ScalingVariant::T1 => k,
            ScalingVariant::Full => k * t,
            ScalingVariant::Partial => k / t,
        }
    }
}

impl fmt::Display for ScalingVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalingVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [ScalingVariant::T1, ScalingVariant::Full, ScalingVariant::Partial]
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scaling variant '{s}'")))
    }
}

/// Per-`s` objective table and its maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPrediction {
    pub variant: ScalingVariant,
    pub m: usize,
    pub k: usize,
    pub t: usize,
    pub power: f64,
    /// `objective[s - 1]` for `s = 1..=M`.
    pub objective: Vec<f64>,
    /// Maximizing `s`, smallest on ties.
    pub s_star: usize,
    pub predicted: f64,
}

/// `C(n, r)` exactly.
pub fn binomial(n: usize, r: usize) -> BigUint {
    if r > n {
        return BigUint::ZERO;
    }
    let r = r.min(n - r);
    let mut c = BigUint::from(1u32);
    for i in 0..r {
        c *= n - i;
        c /= i + 1;
    }
    c
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let v: f64 = x.to_string().parse().unwrap_or(f64::INFINITY);
        return v.ln();
    }
    let shift = bits - 64;
    let top = x >> shift;
    let v: f64 = top.to_string().parse().unwrap_or(f64::INFINITY);
    v.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `M L(L(K)) + M L(P / M)`.
pub fn rbf_scaling(m: usize, k: usize, power: f64, base: LogBase) -> Result<f64> {
    check(m, power)?;
    let kf = k as f64;
    if kf <= std::f64::consts::E {
        return Err(Error::Domain(format!("K = {k} must exceed e")));
    }
    let mf = m as f64;
    Ok(mf * base.log(base.log(kf)) + mf * base.log(power / mf))
}

/// `s L(L(K_eff C(M-1, s-1))) + s L(P / s)` for every `s` in `1..=M`.
pub fn inr_scaling(m: usize, k: usize, t: usize, power: f64, variant: ScalingVariant, base: LogBase) -> Result<ScalingPrediction> {
    check(m, power)?;
    if t == 0 {
        return config("T must be at least 1");
    }
    let k_eff = variant.effective_users(k as f64, t as f64);
    if k_eff <= std::f64::consts::E {
        return Err(Error::Domain(format!("effective user count {k_eff} must exceed e")));
    }
    let objective: Vec<f64> = (1..=m)
        .map(|s| {
            let inner = base.log(k_eff) + base.from_ln(big_ln(&binomial(m - 1, s - 1)));
            let sf = s as f64;
            sf * base.log(inner) + sf * base.log(power / sf)
        })
        .collect();
    let (idx, best) = objective
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    Ok(ScalingPrediction { variant, m, k, t, power, objective, s_star: idx + 1, predicted: best })
}

fn check(m: usize, power: f64) -> Result<()> {
    if m == 0 {
        return config("M must be at least 1");
    }
    if !(power > 0.0) {
        return config(format!("power must be positive, got {power}"));
    }
    Ok(())
}

/// Gap between the INR and RBF scaling laws along a growing user grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub k_grid: Vec<usize>,
    pub gaps: Vec<f64>,
    pub s_star: Vec<usize>,
    /// `s* = M` at the largest `K`.
    pub reaches_full_multiplexing: bool,
}

pub fn limit_consistency_check(m: usize, power: f64, k_grid: &[usize], base: LogBase) -> Result<LimitReport> {
    if k_grid.is_empty() || k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return config("K grid must be non-empty and strictly increasing");
    }
    let mut gaps = Vec::with_capacity(k_grid.len());
    let mut s_star = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let inr = inr_scaling(m, k, 1, power, ScalingVariant::T1, base)?;
        gaps.push(inr.predicted - rbf_scaling(m, k, power, base)?);
        s_star.push(inr.s_star);
    }
    let reaches_full_multiplexing = s_star.last() == Some(&m);
    Ok(LimitReport { k_grid: k_grid.to_vec(), gaps, s_star, reaches_full_multiplexing })
}

/// Column names of the analysis table.
pub const ANALYSIS_CSV_HEADER: [&str; 8] = ["M", "K", "T", "P", "variant", "s", "objective", "is_argmax"];

/// One row per `s` of every prediction.
pub fn write_analysis_csv<W: Write>(writer: W, predictions: &[ScalingPrediction]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ANALYSIS_CSV_HEADER)?;
    for p in predictions {
        for (i, v) in p.objective.iter().enumerate() {
            let s = i + 1;
            w.write_record([
                p.m.to_string(),
                p.k.to_string(),
                p.t.to_string(),
                p.power.to_string(),
                p.variant.to_string(),
                s.to_string(),
                v.to_string(),
                u8::from(s == p.s_star).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: LogBase = LogBase::Natural;

    #[test]
    fn rbf_reference_value() {
        let v = rbf_scaling(4, 100, 10.0, B).unwrap();
        assert!((v - 9.774).abs() < 1e-3);
        let one = rbf_scaling(1, 50, 7.0, B).unwrap();
        assert!((one - (50f64.ln().ln() + 7f64.ln())).abs() < 1e-14);
        assert_eq!(rbf_scaling(3, 40, 3.0, B).unwrap(), 3.0 * 40f64.ln().ln());
        assert!(matches!(rbf_scaling(2, 2, 10.0, B), Err(Error::Domain(_))));
    }

    #[test]
    fn single_antenna_has_one_entry() {
        let p = inr_scaling(1, 30, 1, 10.0, ScalingVariant::T1, B).unwrap();
        assert_eq!(p.objective.len(), 1);
        assert_eq!(p.s_star, 1);
        assert!((p.predicted - (30f64.ln().ln() + 10f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn variants_coincide_for_one_subset() {
        let a = inr_scaling(6, 25, 1, 10.0, ScalingVariant::T1, B).unwrap();
        for v in [ScalingVariant::Full, ScalingVariant::Partial] {
            assert_eq!(inr_scaling(6, 25, 1, 10.0, v, B).unwrap().objective, a.objective);
        }
    }

    #[test]
    fn binomial_row_and_symmetry() {
        let row: Vec<BigUint> = (0..=7).map(|r| binomial(7, r)).collect();
        let expect = [1u32, 7, 21, 35, 35, 21, 7, 1].map(BigUint::from);
        assert_eq!(row, expect);
        for n in 0..40 {
            for r in 0..=n {
                assert_eq!(binomial(n, r), binomial(n, n - r));
            }
        }
        assert!(big_ln(&binomial(3000, 1500)) > 2000.0);
    }

    #[test]
    fn full_majorizes_partial() {
        let f = inr_scaling(8, 20, 2, 10.0, ScalingVariant::Full, B).unwrap();
        let p = inr_scaling(8, 20, 2, 10.0, ScalingVariant::Partial, B).unwrap();
        for (a, b) in f.objective.iter().zip(&p.objective) {
            assert!(a >= b);
        }
        assert!(matches!(
            inr_scaling(8, 5, 2, 10.0, ScalingVariant::Partial, B),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn full_stream_entry_is_rbf_expression() {
        for base in [LogBase::Natural, LogBase::Two, LogBase::Ten] {
            for m in 1..=16 {
                let p = inr_scaling(m, 100, 1, 10.0, ScalingVariant::T1, base).unwrap();
                assert_eq!(p.objective[m - 1], rbf_scaling(m, 100, 10.0, base).unwrap());
            }
        }
    }

    #[test]
    fn limit_gap_closes() {
        let grid: Vec<usize> = (1..=9).map(|e| 10usize.pow(e)).collect();
        let r = limit_consistency_check(2, 10.0, &grid, B).unwrap();
        assert!(r.reaches_full_multiplexing);
        let r1 = limit_consistency_check(1, 10.0, &grid, B).unwrap();
        assert!(r1.gaps.iter().all(|&g| g == 0.0));
        assert!(limit_consistency_check(2, 10.0, &[10, 5], B).is_err());
    }

    #[test]
    fn csv_marks_one_argmax_per_prediction() {
        let p = inr_scaling(4, 20, 2, 10.0, ScalingVariant::Full, B).unwrap();
        let mut buf = Vec::new();
        write_analysis_csv(&mut buf, &[p.clone()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "M,K,T,P,variant,s,objective,is_argmax");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines.iter().filter(|l| l.ends_with(",1")).count(), 1);
        assert!(lines[p.s_star].starts_with("4,20,2,10,full,"));
    }
}
