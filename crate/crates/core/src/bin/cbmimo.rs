use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cbmimo::analysis::{inr_scaling, write_analysis_csv, LogBase, ScalingVariant};
use cbmimo::codebook::build_dft_codebook;
use cbmimo::harness::{preset, run_sweep, write_run_files, ExperimentConfig, RunRecord};

#[derive(Parser)]
#[command(name = "cbmimo", version, about = "Codebook-based MU-MIMO downlink simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config file.
    Run {
        config: PathBuf,
        /// Per-drop CSV path (overrides `output` in the file).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a figure preset (fig1 .. fig8).
    Preset {
        name: String,
        /// Defaults to `runs/<name>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Print the preset as TOML instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Emit the scaling-law objective table as CSV.
    Analyze {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Transmit SNR in dB; `P = 10^(snr/10)`.
        #[arg(long, default_value_t = 10.0)]
        snr_db: f64,
        /// Comma-separated subset of t1, full, partial.
        #[arg(long, value_delimiter = ',', default_value = "t1,full,partial")]
        variant: Vec<String>,
        /// e, 2 or 10.
        #[arg(long, default_value = "e")]
        base: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the DFT codebook as CSV.
    Codebook {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn sink(out: Option<&Path>) -> cbmimo::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(cli: Cli) -> cbmimo::Result<()> {
    match cli.command {
        Command::Run { config, out, drops, seed } => {
            let mut c = ExperimentConfig::from_file(&config)?;
            apply_overrides(&mut c, drops, seed)?;
            let path = out.or_else(|| c.output.clone()).unwrap_or_else(|| PathBuf::from("run.csv"));
            sweep(&c, &path)
        }
        Command::Preset { name, out, drops, seed, print_config } => {
            let mut c = preset(&name)?;
            apply_overrides(&mut c, drops, seed)?;
            if print_config {
                print!("{}", c.to_toml_string()?);
                return Ok(());
            }
            let path = out.unwrap_or_else(|| PathBuf::from(format!("runs/{name}.csv")));
            sweep(&c, &path)
        }
        Command::Analyze { m, k, t, snr_db, variant, base, out } => {
            let base: LogBase = base.parse()?;
            let variants: Vec<ScalingVariant> = variant.iter().map(|v| v.parse()).collect::<cbmimo::Result<_>>()?;
            let power = 10f64.powf(snr_db / 10.0);
            let mut preds = Vec::new();
            for &kk in &k {
                for &v in &variants {
                    preds.push(inr_scaling(m, kk, t, power, v, base)?);
                }
            }
            let mut w = sink(out.as_deref())?;
            write_analysis_csv(&mut w, &preds)?;
            w.flush()?;
            Ok(())
        }
        Command::Codebook { m, t, out } => {
            let cb = build_dft_codebook(m, t)?;
            let mut w = sink(out.as_deref())?;
            cb.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn apply_overrides(c: &mut ExperimentConfig, drops: Option<usize>, seed: Option<u64>) -> cbmimo::Result<()> {
    if let Some(d) = drops {
        c.drops = d;
    }
    if let Some(s) = seed {
        c.base_seed = s;
    }
    c.validate()
}

fn sweep(c: &ExperimentConfig, path: &Path) -> cbmimo::Result<()> {
    let record = run_sweep(c)?;
    let (rows, summary) = write_run_files(&record, path)?;
    print_summary(&record);
    eprintln!("wrote {} and {}", rows.display(), summary.display());
    Ok(())
}

fn print_summary(record: &RunRecord) {
    println!("{:<9} {:>8} {:>6} {:>7} {:>5} {:<12} {:>9} {:>7} {:>9}", "fading", "spread", "err", "snr_db", "k", "scheme", "rate", "se", "adjusted");
    for s in &record.summary {
        let spread = s.point.spread_deg.map_or("-".to_string(), |[a, b]| format!("{a}-{b}"));
        println!(
            "{:<9} {:>8} {:>6} {:>7} {:>5} {:<12} {:>9.4} {:>7.4} {:>9.4}",
            s.point.fading.as_str(),
            spread,
            s.point.err_var,
            s.point.snr_db,
            s.point.k,
            s.scheme.as_str(),
            s.raw.mean,
            s.raw.se,
            s.adjusted.mean
        );
    }
}
