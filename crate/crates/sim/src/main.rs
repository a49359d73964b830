use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use isi_core::montecarlo::{run_antenna_sweep, run_cdf_experiment, run_surface, run_zeta_convergence, DropSource};
use isi_sim::results::{write_cdf, write_sweep, write_to, write_zeta};
use isi_sim::selftest::run_selftest;
use isi_sim::{load_config, read_pathlist, CdfSource, Config, RayonExecutor};

#[derive(Parser)]
#[command(
    name = "isi-sim",
    version,
    about = "ISI after multi-antenna combining: sweeps, CDFs and convergence tables"
)]
struct Cli {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `experiment.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean ISI power against antenna count, with log-log fits.
    Sweep,
    /// Mean ISI power over the full (M, L) grid.
    Surface,
    /// RMS delay spread CDFs over path-list or synthetic drops.
    Cdf {
        /// Path-list CSV; overrides `cdf.pathlist` and the synthetic generator.
        #[arg(long)]
        pathlist: Option<PathBuf>,
    },
    /// Beam-correlation gap to its large-array limit.
    Zeta,
    /// Runs the built-in invariant checks.
    Selftest,
}

fn load(cli: &Cli) -> anyhow::Result<Config> {
    let config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            load_config(&text).with_context(|| format!("invalid config {}", path.display()))?
        }
        None => Config::default(),
    };
    Ok(match cli.seed {
        Some(seed) => config.with_seed(seed),
        None => config,
    })
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let exec = RayonExecutor::new(cli.threads).context("cannot start worker threads")?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Sweep | Command::Surface => {
            let config = load(&cli)?;
            let result = match cli.command {
                Command::Sweep => run_antenna_sweep(&config.sweep, &exec)?,
                _ => run_surface(&config.sweep, &exec)?,
            };
            write_to(out, |w| write_sweep(w, &config.experiment_id, &result))?;
        }
        Command::Cdf { pathlist } => {
            let config = load(&cli)?;
            let file = pathlist.clone().or(match &config.cdf_source {
                CdfSource::PathList(p) => Some(p.clone()),
                CdfSource::Synthetic(_) => None,
            });
            let source = match (file, &config.cdf_source) {
                (Some(path), _) => {
                    let f = File::open(&path).with_context(|| format!("cannot open {}", path.display()))?;
                    let drops = read_pathlist(BufReader::new(f)).with_context(|| format!("in {}", path.display()))?;
                    DropSource::Paths(drops.into_values().collect())
                }
                (None, CdfSource::Synthetic(s)) => DropSource::Synthetic(*s),
                (None, CdfSource::PathList(_)) => unreachable!(),
            };
            let result = run_cdf_experiment(&config.cdf, &source, &exec)?;
            write_to(out, |w| write_cdf(w, &config.experiment_id, &result))?;
        }
        Command::Zeta => {
            let config = load(&cli)?;
            let z = &config.zeta;
            let rows = run_zeta_convergence(&z.paths, z.spacing_ratio, &z.pulse, &z.antenna_counts)?;
            write_to(out, |w| write_zeta(w, &config.experiment_id, config.master_seed, &rows))?;
        }
        Command::Selftest => {
            if cli.config.is_some() || out.is_some() {
                bail!("selftest takes no --config or --out");
            }
            let checks = run_selftest(exec.threads());
            for c in &checks {
                println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
