//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit
//! if any criterion fails.
//!
//! Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use cbmimo::analysis::{inr_scaling, rbf_scaling, LogBase, ScalingVariant};
use cbmimo::codebook::build_dft_codebook;
use cbmimo::feedback::{compute_full_inr, compute_partial_inr};
use cbmimo::harness::{run_sweep, ExperimentConfig, Fading, RunRecord, SnrModel, Stat, SweepContext};
use cbmimo::metrics::{overhead_factor, OverheadMode};
use cbmimo::rng::{complex_gaussian, rng_from_seed};
use cbmimo::scheduler::{
    schedule_full_inr, schedule_partial_inr, sinr_from_inrs, FullInrMode, PartialInrOptions, Scheme,
};
use cbmimo::{CMatrix, CVector};

const STAT_DROPS: usize = 1000;
const Z95: f64 = 1.96;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn ci(s: Stat) -> (f64, f64) {
    (s.mean - Z95 * s.se, s.mean + Z95 * s.se)
}

/// `a` above `b` with disjoint 95% intervals.
fn separated(a: Stat, b: Stat) -> bool {
    ci(a).0 > ci(b).1
}

fn fmt(s: Stat) -> String {
    format!("{:.3}±{:.3}", s.mean, Z95 * s.se)
}

fn stat(r: &RunRecord, scheme: Scheme, pick: impl Fn(&cbmimo::harness::SummaryRow) -> bool) -> cbmimo::harness::SummaryRow {
    r.summary
        .iter()
        .find(|s| s.scheme == scheme && pick(s))
        .cloned()
        .unwrap_or_else(|| panic!("no summary row for {scheme}"))
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn exactness() -> Outcome {
    let mut rng = rng_from_seed(0xACCE);
    let mut worst_unit = 0.0f64;
    for (m, t) in [(2, 1), (4, 2), (8, 2), (16, 2), (16, 4), (7, 3)] {
        let cb = build_dft_codebook(m, t).unwrap();
        for l in 0..cb.size() {
            worst_unit = worst_unit.max((cb.vector(l).norm() - 1.0).abs());
        }
        for tt in 0..t {
            let cols = cb.subset(tt).unwrap();
            let u = CMatrix::from_columns(&cols);
            let g = u.adjoint() * &u - CMatrix::identity(m, m);
            worst_unit = worst_unit.max(g.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }

    let mut worst_parseval = 0.0f64;
    for _ in 0..2000 {
        let m = rng.random_range(2..=16);
        let t = rng.random_range(1..=4);
        let cb = build_dft_codebook(m, t).unwrap();
        let h = CVector::from_fn(m, |_, _| complex_gaussian(&mut rng));
        let noise = 10f64.powf(rng.random_range(-2.0..1.0));
        let full = compute_full_inr(&h, noise, &cb);
        let energy = h.norm_squared() / noise;
        for tt in 0..t {
            let sum: f64 = (0..m).map(|j| full.inrs[cb.flat(tt, j)]).sum();
            worst_parseval = worst_parseval.max(rel_err(sum, energy));
        }
    }

    let mut worst_sinr = 0.0f64;
    for _ in 0..10_000 {
        let m = rng.random_range(2..=16);
        let cb = build_dft_codebook(m, 2).unwrap();
        let tt = rng.random_range(0..2);
        let h = CVector::from_fn(m, |_, _| complex_gaussian(&mut rng));
        let noise = 10f64.powf(rng.random_range(-2.0..1.0));
        let power = 10f64.powf(rng.random_range(-1.0..3.0));
        let active: Vec<usize> = loop {
            let a: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
            if !a.is_empty() {
                break a;
            }
        };
        let serving = active[rng.random_range(0..active.len())];
        let gain = |j: usize| cb.vector(cb.flat(tt, j)).dotc(&h).norm_sqr();
        let inrs: Vec<f64> = (0..m).map(|j| gain(j) / noise).collect();
        let p = power / active.len() as f64;
        let interference: f64 = active.iter().filter(|&&j| j != serving).map(|&j| p * gain(j)).sum();
        let direct = p * gain(serving) / (noise + interference);
        let rebuilt = sinr_from_inrs(&inrs, serving, &active, power).unwrap();
        worst_sinr = worst_sinr.max(rel_err(rebuilt, direct));
    }

    let mut c = ExperimentConfig::new(8, vec![16], vec![10.0], 500, vec![Scheme::PartialInr]);
    c.fading = vec![Fading::Iid, Fading::OneRing];
    c.base_seed = 11;
    let run = run_sweep(&c).unwrap();
    let worst_rate = run
        .rows
        .iter()
        .map(|r| rel_err(r.result.predicted_sum_rate, r.result.sum_rate_raw))
        .fold(0.0, f64::max);

    let pass = worst_unit <= 1e-10 && worst_parseval <= 1e-10 && worst_sinr <= 1e-12 && worst_rate <= 1e-9;
    outcome(
        pass,
        format!(
            "unit/unitary {worst_unit:.1e} (1e-10), parseval {worst_parseval:.1e} (1e-10), \
             sinr rebuild {worst_sinr:.1e} (1e-12), partial predicted vs realized {worst_rate:.1e} (1e-9) over {} drops",
            run.rows.len()
        ),
    )
}

fn overhead_table() -> Outcome {
    let table = [10, 10, 9, 9, 8, 8, 7, 7, 6, 6, 5, 5, 4, 4, 3, 3];
    let mut bad = Vec::new();
    for (i, &num) in table.iter().enumerate() {
        let s = i + 1;
        for scheme in [Scheme::ZfbfSus, Scheme::DftSinr, Scheme::Rbf] {
            let k = overhead_factor(scheme, s, 16, None, OverheadMode::Fixed).unwrap();
            if k != num as f64 / 14.0 {
                bad.push(format!("{scheme} S={s}: {k}"));
            }
        }
        for scheme in [Scheme::FullInr, Scheme::PartialInr, Scheme::OneBitInr] {
            let k = overhead_factor(scheme, s, 16, None, OverheadMode::Fixed).unwrap();
            if k != 10.0 / 14.0 {
                bad.push(format!("{scheme} S={s}: {k}"));
            }
        }
    }
    let detail = if bad.is_empty() { "S=1..16 no-INR table and INR 10/14 exact".to_string() } else { bad.join("; ") };
    outcome(bad.is_empty(), detail)
}

/// Best accumulated rate over every (subset, size, combination), rebuilt
/// from the reports with bit masks.
fn reenumerate_partial(reports: &[cbmimo::feedback::PartialInrReport], m: usize, t: usize, power: f64) -> f64 {
    let mut best = 0.0f64;
    for tt in 0..t {
        let mine: Vec<&[f64]> = reports.iter().filter(|r| r.subset_t == tt).map(|r| r.inrs.as_slice()).collect();
        if mine.is_empty() {
            continue;
        }
        for mask in 1u32..(1 << m) {
            let active: Vec<usize> = (0..m).filter(|&j| mask >> j & 1 == 1).collect();
            let mut used = vec![false; mine.len()];
            let mut mu = 0.0;
            for &q in &active {
                let mut pick = 0;
                let mut pick_g = f64::NEG_INFINITY;
                for (i, inrs) in mine.iter().enumerate() {
                    let g = sinr_from_inrs(inrs, q, &active, power).unwrap();
                    if g > pick_g {
                        pick = i;
                        pick_g = g;
                    }
                }
                if used[pick] {
                    break;
                }
                used[pick] = true;
                mu += (1.0 + pick_g).log2();
            }
            best = best.max(mu);
        }
    }
    best
}

fn oracle_suite() -> Outcome {
    let mut greedy_bad = 0;
    let mut partial_worst = 0.0f64;
    let mut cases = 0;
    for m in 2..=4 {
        for k in 4..=6 {
            let mut c = ExperimentConfig::new(m, vec![k], vec![10.0], 200, vec![Scheme::PartialInr]);
            c.t = 1;
            c.base_seed = 23;
            let ctx = SweepContext::new(&c).unwrap();
            let cb = ctx.codebook();
            let point = c.grid()[0];
            let power = point.power();
            for d in 0..c.drops as u64 {
                let ch = ctx.channel(&point, d).unwrap();
                let h = ch.csit();
                let full: Vec<_> = (0..k).map(|u| compute_full_inr(&h.column(u).into_owned(), ch.noise_power[u], cb)).collect();
                let g = schedule_full_inr(&full, cb, power, FullInrMode::Greedy).unwrap();
                let e = schedule_full_inr(&full, cb, power, FullInrMode::Exhaustive).unwrap();
                if g.objective > e.objective * (1.0 + 1e-12) {
                    greedy_bad += 1;
                }
                let partial: Vec<_> = (0..k).map(|u| compute_partial_inr(&h.column(u).into_owned(), ch.noise_power[u], cb)).collect();
                let d = schedule_partial_inr(&partial, cb, power, PartialInrOptions::default()).unwrap();
                let oracle = reenumerate_partial(&partial, m, 1, power);
                partial_worst = partial_worst.max(rel_err(d.objective, oracle));
                cases += 1;
            }
        }
    }
    outcome(
        greedy_bad == 0 && partial_worst <= 1e-9,
        format!("{cases} drops: greedy > exhaustive on {greedy_bad}, partial mu vs re-enumeration {partial_worst:.1e}"),
    )
}

fn fig1() -> Outcome {
    let mut c = ExperimentConfig::new(16, vec![20], vec![10.0], STAT_DROPS, vec![Scheme::ZfbfSus, Scheme::PartialInr, Scheme::Rbf]);
    c.fading = vec![Fading::Iid];
    c.base_seed = 1;
    let r = run_sweep(&c).unwrap();
    let z = stat(&r, Scheme::ZfbfSus, |_| true).raw;
    let p = stat(&r, Scheme::PartialInr, |_| true).raw;
    let b = stat(&r, Scheme::Rbf, |_| true).raw;
    outcome(
        separated(z, p) && separated(p, b),
        format!("zfbf_sus {} > partial_inr {} > rbf {}", fmt(z), fmt(p), fmt(b)),
    )
}

fn flexibility_gain() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [4, 8] {
        let large = 50 * m / 4;
        let ks = vec![m, m + 4, large];
        let mut c = ExperimentConfig::new(m, ks, vec![10.0], STAT_DROPS, vec![Scheme::PartialInr, Scheme::DftSinr]);
        c.fading = vec![Fading::Iid, Fading::OneRing];
        c.base_seed = 2;
        let r = run_sweep(&c).unwrap();
        for fading in [Fading::Iid, Fading::OneRing] {
            let at = |k: usize, s: Scheme| stat(&r, s, |x| x.point.k == k && x.point.fading == fading).raw;
            let gap = |k: usize| at(k, Scheme::PartialInr).mean - at(k, Scheme::DftSinr).mean;
            let small_ok = [m, m + 4].iter().all(|&k| separated(at(k, Scheme::PartialInr), at(k, Scheme::DftSinr)));
            let shrinks = gap(large) < gap(m);
            pass &= small_ok && shrinks;
            parts.push(format!(
                "M={m} {}: K={m} {} vs {}, K={} {} vs {}, gap {:.3} -> {:.3} at K={large}",
                fading.as_str(),
                fmt(at(m, Scheme::PartialInr)),
                fmt(at(m, Scheme::DftSinr)),
                m + 4,
                fmt(at(m + 4, Scheme::PartialInr)),
                fmt(at(m + 4, Scheme::DftSinr)),
                gap(m),
                gap(large)
            ));
        }
    }
    outcome(pass, parts.join("; "))
}

fn correlation_trend() -> Outcome {
    let mut c = ExperimentConfig::new(8, vec![8, 16, 32], vec![10.0], STAT_DROPS, vec![Scheme::ZfbfSus, Scheme::PartialInr]);
    c.fading = vec![Fading::OneRing];
    c.spread_deg = vec![[5.0, 10.0], [20.0, 40.0]];
    c.base_seed = 5;
    let r = run_sweep(&c).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [8, 16, 32] {
        let gap = |lo: f64| {
            let pick = |x: &cbmimo::harness::SummaryRow| x.point.k == k && x.point.spread_deg.map(|s| s[0]) == Some(lo);
            stat(&r, Scheme::ZfbfSus, pick).raw.mean - stat(&r, Scheme::PartialInr, pick).raw.mean
        };
        let (narrow, wide) = (gap(5.0), gap(20.0));
        pass &= narrow < wide;
        parts.push(format!("K={k}: gap {narrow:.3} at [5,10] vs {wide:.3} at [20,40]"));
    }
    outcome(pass, parts.join("; "))
}

fn csit_sensitivity() -> Outcome {
    let mut c = ExperimentConfig::new(16, vec![16], vec![10.0], STAT_DROPS, vec![Scheme::ZfbfSus, Scheme::PartialInr]);
    c.fading = vec![Fading::OneRing];
    c.err_var = vec![0.0, 0.2];
    c.base_seed = 6;
    let r = run_sweep(&c).unwrap();
    let loss = |s: Scheme| {
        let clean = stat(&r, s, |x| x.point.err_var == 0.0).raw.mean;
        let noisy = stat(&r, s, |x| x.point.err_var == 0.2).raw.mean;
        (clean - noisy) / clean
    };
    let (z, p) = (loss(Scheme::ZfbfSus), loss(Scheme::PartialInr));
    outcome(z > p, format!("K=16 relative loss 0 -> 0.2: zfbf_sus {:.1}%, partial_inr {:.1}%", 100.0 * z, 100.0 * p))
}

fn pilot_crossover() -> Outcome {
    let ks = [8, 16, 24, 32, 40];
    let mut c = ExperimentConfig::new(16, ks.to_vec(), vec![10.0], STAT_DROPS, vec![Scheme::ZfbfSus, Scheme::PartialInr]);
    c.fading = vec![Fading::OneRing];
    c.err_var = vec![0.1];
    c.overhead_mode = OverheadMode::Fixed;
    c.base_seed = 7;
    let r = run_sweep(&c).unwrap();
    let curve = |s: Scheme| ks.iter().map(|&k| stat(&r, s, |x| x.point.k == k).adjusted).collect::<Vec<_>>();
    let (z, p) = (curve(Scheme::ZfbfSus), curve(Scheme::PartialInr));
    let increasing = p.windows(2).all(|w| w[1].mean > w[0].mean);
    let growth = |v: &[Stat]| v[v.len() - 1].mean - v[0].mean;
    let outgrows = growth(&p) > growth(&z);
    let wins = separated(p[p.len() - 1], z[z.len() - 1]);
    let show = |v: &[Stat]| v.iter().map(|s| format!("{:.2}", s.mean)).collect::<Vec<_>>().join(" ");
    outcome(
        increasing && outgrows && wins,
        format!(
            "adjusted partial_inr [{}] growth {:.2}, zfbf_sus [{}] growth {:.2}, K=40 {} vs {}",
            show(&p),
            growth(&p),
            show(&z),
            growth(&z),
            fmt(p[p.len() - 1]),
            fmt(z[z.len() - 1])
        ),
    )
}

fn scaling_trend() -> Outcome {
    let base = LogBase::Natural;
    let power = 10.0;
    let mut identity_ok = true;
    for m in 1..=16 {
        for k in [4, 8, 16, 32, 100, 1000] {
            let p = inr_scaling(m, k, 1, power, ScalingVariant::T1, base).unwrap();
            identity_ok &= p.objective[m - 1] == rbf_scaling(m, k, power, base).unwrap();
        }
    }
    let ks = [8, 16, 32];
    let mut c = ExperimentConfig::new(8, ks.to_vec(), vec![10.0], STAT_DROPS, vec![Scheme::PartialInr]);
    c.t = 1;
    c.fading = vec![Fading::Iid];
    c.base_seed = 8;
    let r = run_sweep(&c).unwrap();
    let mut trend_ok = true;
    let mut parts = Vec::new();
    for k in ks {
        let mut hist = [0usize; 9];
        for row in r.rows.iter().filter(|x| x.point.k == k) {
            hist[row.result.s] += 1;
        }
        let mode = (0..hist.len()).max_by_key(|&s| (hist[s], std::cmp::Reverse(s))).unwrap();
        let argmax = inr_scaling(8, k, 1, power, ScalingVariant::T1, base).unwrap().s_star;
        trend_ok &= mode.abs_diff(argmax) <= 1;
        parts.push(format!("K={k}: mode {mode} hist {:?} vs argmax {argmax}", &hist[1..]));
    }
    outcome(
        identity_ok && trend_ok,
        format!("s=M identity {}; {}", if identity_ok { "exact" } else { "broken" }, parts.join("; ")),
    )
}

fn one_bit() -> Outcome {
    let mut c = ExperimentConfig::new(16, vec![16, 32], vec![10.0], STAT_DROPS, vec![Scheme::PartialInr, Scheme::OneBitInr]);
    c.fading = vec![Fading::OneRing];
    c.snr_model = SnrModel::LogUniform;
    c.err_var = vec![0.1];
    c.gamma_threshold = 0.02;
    c.base_seed = 9;
    let r = run_sweep(&c).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [16, 32] {
        let p = stat(&r, Scheme::PartialInr, |x| x.point.k == k).raw.mean;
        let b = stat(&r, Scheme::OneBitInr, |x| x.point.k == k).raw.mean;
        pass &= b >= 0.85 * p;
        parts.push(format!("K={k}: one_bit_inr {b:.3} / partial_inr {p:.3} = {:.3}", b / p));
    }
    outcome(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exactness", exactness),
        ("overhead factors", overhead_table),
        ("oracle suite", oracle_suite),
        ("fig1 ordering", fig1),
        ("figs2-4 flexibility gain", flexibility_gain),
        ("fig5 correlation trend", correlation_trend),
        ("fig6 csit sensitivity", csit_sensitivity),
        ("fig7 pilot-adjusted crossover", pilot_crossover),
        ("scaling-law trend", scaling_trend),
        ("fig8 one-bit ratio", one_bit),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name} ({:.1}s): {}", start.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
