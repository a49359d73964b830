//! CSV result files. Every file carries the master seed and RNG name needed
//! to regenerate it.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use isi_core::montecarlo::{CdfResult, SweepResult, ZetaGapRow};
use isi_core::stochastic::RNG_NAME;

pub const SWEEP_HEADER: [&str; 9] = [
    "experiment_id",
    "M",
    "L",
    "combiner",
    "statistic",
    "value",
    "trials",
    "master_seed",
    "rng_name",
];

pub const CDF_HEADER: [&str; 4] = ["M", "combiner", "percentile", "rms_ds_seconds"];

pub const ZETA_HEADER: [&str; 10] = [
    "experiment_id",
    "M",
    "steered_path",
    "zeta_re",
    "zeta_im",
    "limit_re",
    "limit_im",
    "gap",
    "master_seed",
    "rng_name",
];

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Mean and standard deviation rows for every cell, sorted by `(M, L,
/// combiner)`, then the log-log fit rows with `M = fit`.
pub fn write_sweep<W: Write>(w: W, experiment_id: &str, result: &SweepResult) -> csv::Result<()> {
    let mut w = csv_writer(w);
    w.write_record(SWEEP_HEADER)?;
    let trials = result.trials.to_string();
    let seed = result.master_seed.to_string();
    let mut emit = |m: &str, l: usize, combiner: &str, stat: &str, value: f64| {
        w.write_record([
            experiment_id,
            m,
            &l.to_string(),
            combiner,
            stat,
            &value.to_string(),
            &trials,
            &seed,
            RNG_NAME,
        ])
    };
    for row in &result.rows {
        let m = row.num_antennas.to_string();
        emit(&m, row.num_taps, row.combiner.name(), "mean_rho", row.mean_rho)?;
        emit(&m, row.num_taps, row.combiner.name(), "std_rho", row.std_rho)?;
    }
    for fit in &result.fits {
        let c = fit.combiner.name();
        emit("fit", fit.num_taps, c, "slope", fit.fit.slope)?;
        emit("fit", fit.num_taps, c, "intercept", fit.fit.intercept)?;
        emit("fit", fit.num_taps, c, "r_squared", fit.fit.r_squared)?;
    }
    w.flush()?;
    Ok(())
}

/// Percentiles 1% to 100% of every curve, preceded by a `#` metadata line.
pub fn write_cdf<W: Write>(mut w: W, experiment_id: &str, result: &CdfResult) -> csv::Result<()> {
    writeln!(
        w,
        "# experiment_id={experiment_id} master_seed={} rng_name={RNG_NAME} drops={}",
        result.master_seed, result.drops
    )?;
    let mut w = csv_writer(w);
    w.write_record(CDF_HEADER)?;
    for curve in &result.curves {
        let m = curve.num_antennas.to_string();
        for pct in 1..=100u32 {
            w.write_record([
                m.as_str(),
                curve.combiner.name(),
                &pct.to_string(),
                &curve.cdf.percentile(pct).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// The zeta table is deterministic; the seed columns are kept so every file
/// has the same metadata.
pub fn write_zeta<W: Write>(w: W, experiment_id: &str, master_seed: u64, rows: &[ZetaGapRow]) -> csv::Result<()> {
    let mut w = csv_writer(w);
    w.write_record(ZETA_HEADER)?;
    let seed = master_seed.to_string();
    for r in rows {
        w.write_record([
            experiment_id,
            &r.num_antennas.to_string(),
            &r.steered.to_string(),
            &r.zeta.re.to_string(),
            &r.zeta.im.to_string(),
            &r.limit.re.to_string(),
            &r.limit.im.to_string(),
            &r.gap.to_string(),
            &seed,
            RNG_NAME,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `write` against a buffered file at `path`, or stdout when `None`.
pub fn write_to<F>(path: Option<&Path>, write: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut dyn Write) -> csv::Result<()>,
{
    match path {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut out = BufWriter::new(file);
            write(&mut out).with_context(|| format!("cannot write {}", path.display()))?;
            out.flush()
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            write(&mut out).context("cannot write to stdout")?;
            out.flush()?;
        }
    }
    Ok(())
}
