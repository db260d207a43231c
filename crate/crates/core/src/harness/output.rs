use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::config::GridPoint;
use super::sweep::RunRecord;

/// Version of the CSV layouts below.
pub const SCHEMA_VERSION: u32 = 1;

pub const ROW_CSV_HEADER: [&str; 20] = [
    "drop",
    "fading",
    "spread_lo_deg",
    "spread_hi_deg",
    "err_var",
    "snr_db",
    "m",
    "k",
    "t",
    "scheme",
    "s",
    "subset",
    "users",
    "beams",
    "objective",
    "predicted_sum_rate",
    "sum_rate_raw",
    "overhead_factor",
    "sum_rate_adjusted",
    "sum_rate_outage",
];

pub const SUMMARY_CSV_HEADER: [&str; 17] = [
    "fading",
    "spread_lo_deg",
    "spread_hi_deg",
    "err_var",
    "snr_db",
    "m",
    "k",
    "t",
    "scheme",
    "drops",
    "mean_s",
    "mean_sum_rate_raw",
    "se_sum_rate_raw",
    "mean_sum_rate_adjusted",
    "se_sum_rate_adjusted",
    "mean_sum_rate_outage",
    "se_sum_rate_outage",
];

fn header_line(record: &RunRecord) -> String {
    format!("# cbmimo schema={SCHEMA_VERSION} config_sha256={}\n", record.config_hash)
}

fn point_fields(p: &GridPoint) -> [String; 4] {
    let (lo, hi) = match p.spread_deg {
        Some([lo, hi]) => (lo.to_string(), hi.to_string()),
        None => (String::new(), String::new()),
    };
    [p.fading.as_str().to_string(), lo, hi, p.err_var.to_string()]
}

fn join(values: impl IntoIterator<Item = usize>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Per-drop rows, preceded by a `#` comment line carrying the config hash.
pub fn write_rows_csv<W: Write>(mut out: W, record: &RunRecord) -> Result<()> {
    out.write_all(header_line(record).as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROW_CSV_HEADER)?;
    let (m, t) = (record.config.m, record.config.t);
    for r in &record.rows {
        let [fading, lo, hi, err] = point_fields(&r.point);
        let d = &r.decision;
        w.write_record([
            r.drop.to_string(),
            fading,
            lo,
            hi,
            err,
            r.point.snr_db.to_string(),
            m.to_string(),
            r.point.k.to_string(),
            t.to_string(),
            d.scheme.to_string(),
            d.len().to_string(),
            d.subset.map_or("-1".to_string(), |s| s.to_string()),
            join(d.users.iter().copied()),
            join(d.beams.iter().map(|b| b.id())),
            d.objective.to_string(),
            r.result.predicted_sum_rate.to_string(),
            r.result.sum_rate_raw.to_string(),
            r.result.overhead_factor.to_string(),
            r.result.sum_rate_adjusted.to_string(),
            r.result.sum_rate_outage.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean and standard error per grid point and scheme.
pub fn write_summary_csv<W: Write>(mut out: W, record: &RunRecord) -> Result<()> {
    out.write_all(header_line(record).as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_CSV_HEADER)?;
    let (m, t) = (record.config.m, record.config.t);
    for s in &record.summary {
        let [fading, lo, hi, err] = point_fields(&s.point);
        w.write_record([
            fading,
            lo,
            hi,
            err,
            s.point.snr_db.to_string(),
            m.to_string(),
            s.point.k.to_string(),
            t.to_string(),
            s.scheme.to_string(),
            s.drops.to_string(),
            s.mean_s.to_string(),
            s.raw.mean.to_string(),
            s.raw.se.to_string(),
            s.adjusted.mean.to_string(),
            s.adjusted.se.to_string(),
            s.outage.mean.to_string(),
            s.outage.se.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `runs/fig1.csv` becomes `runs/fig1_summary.csv`.
pub fn summary_path(rows_path: &Path) -> PathBuf {
    let stem = rows_path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
    rows_path.with_file_name(format!("{stem}_summary.csv"))
}

/// Writes both CSVs and returns their paths.
pub fn write_run_files(record: &RunRecord, rows_path: &Path) -> Result<(PathBuf, PathBuf)> {
    if let Some(dir) = rows_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_rows_csv(BufWriter::new(File::create(rows_path)?), record)?;
    let sp = summary_path(rows_path);
    write_summary_csv(BufWriter::new(File::create(&sp)?), record)?;
    Ok((rows_path.to_path_buf(), sp))
}
