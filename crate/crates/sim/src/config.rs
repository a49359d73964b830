//! TOML experiment configuration.
//!
//! Every section and key is optional; see `README.md` for the grammar and
//! defaults. Unknown keys and duplicate keys are rejected.

use std::f64::consts::PI;
use std::path::PathBuf;

use isi_core::channel::{Path, PathSet, PulseShape};
use isi_core::montecarlo::{CdfConfig, Combiner, EgcRhoMode, ExperimentConfig, MrcResponse, SyntheticDrops};
use isi_core::stochastic::FadingKind;
use isi_core::C64;
use serde::Deserialize;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field}: {reason}")]
    Field { field: &'static str, reason: String },
}

fn field(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    experiment: RawExperiment,
    #[serde(default)]
    channel: RawChannel,
    #[serde(default)]
    pulse: RawPulse,
    #[serde(default)]
    array: RawArray,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    cdf: RawCdf,
    #[serde(default)]
    zeta: RawZeta,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawExperiment {
    id: String,
    master_seed: u64,
    trials: usize,
}

impl Default for RawExperiment {
    fn default() -> Self {
        Self {
            id: "experiment".into(),
            master_seed: 0,
            trials: 1000,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawChannel {
    kind: String,
    los_mean: Option<f64>,
}

impl Default for RawChannel {
    fn default() -> Self {
        Self {
            kind: "rayleigh".into(),
            los_mean: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawPulse {
    rolloff: f64,
    symbol_period_ns: f64,
    span: usize,
}

impl Default for RawPulse {
    fn default() -> Self {
        Self {
            rolloff: 0.25,
            symbol_period_ns: 100.0,
            span: 8,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawArray {
    spacing: f64,
}

impl Default for RawArray {
    fn default() -> Self {
        Self { spacing: 0.5 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawCounts {
    List(Vec<usize>),
    Range(RawRange),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    start: usize,
    stop: usize,
    step: usize,
}

impl RawCounts {
    fn expand(&self, name: &'static str) -> Result<Vec<usize>, ConfigError> {
        match self {
            RawCounts::List(v) => Ok(v.clone()),
            RawCounts::Range(r) => {
                if r.step == 0 || r.start > r.stop {
                    return Err(field(name, "range needs step >= 1 and start <= stop"));
                }
                Ok((r.start..=r.stop).step_by(r.step).collect())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSweep {
    antenna_counts: RawCounts,
    tap_lengths: RawCounts,
    combiners: Vec<String>,
    egc_rho: String,
    egc_symbols: Option<usize>,
}

impl Default for RawSweep {
    fn default() -> Self {
        Self {
            antenna_counts: RawCounts::Range(RawRange {
                start: 8,
                stop: 1024,
                step: 8,
            }),
            tap_lengths: RawCounts::List(vec![8]),
            combiners: vec!["MRC".into(), "EGC".into()],
            egc_rho: "tap-limit".into(),
            egc_symbols: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawCdf {
    antenna_counts: RawCounts,
    combiners: Vec<String>,
    num_taps: usize,
    mrc_response: String,
    pathlist: Option<PathBuf>,
    drops: usize,
    min_paths: usize,
    max_paths: usize,
    max_delay_symbols: f64,
}

impl Default for RawCdf {
    fn default() -> Self {
        Self {
            antenna_counts: RawCounts::List(vec![16, 256]),
            combiners: Combiner::ALL.iter().map(|c| c.name().to_string()).collect(),
            num_taps: 16,
            mrc_response: "gramian-peak-row".into(),
            pathlist: None,
            drops: 10_000,
            min_paths: 1,
            max_paths: 8,
            max_delay_symbols: 7.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    gain_re: f64,
    gain_im: f64,
    #[serde(default)]
    delay_ns: f64,
    aoa_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawZeta {
    antenna_counts: RawCounts,
    paths: Vec<RawPath>,
}

impl Default for RawZeta {
    fn default() -> Self {
        let path = |re, im, cos: f64| RawPath {
            gain_re: re,
            gain_im: im,
            delay_ns: 0.0,
            aoa_deg: cos.acos().to_degrees(),
        };
        Self {
            antenna_counts: RawCounts::List(vec![64, 256, 1024, 4096]),
            paths: vec![path(1.0, 0.5, 0.3), path(-0.7, 0.2, 0.25), path(0.4, -0.9, -0.2)],
        }
    }
}

/// Where CDF drops come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CdfSource {
    PathList(PathBuf),
    Synthetic(SyntheticDrops),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaPlan {
    pub paths: PathSet,
    pub spacing_ratio: f64,
    pub pulse: PulseShape,
    pub antenna_counts: Vec<usize>,
}

/// A validated configuration covering every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment_id: String,
    pub master_seed: u64,
    pub pulse: PulseShape,
    pub spacing_ratio: f64,
    pub sweep: ExperimentConfig,
    pub cdf: CdfConfig,
    pub cdf_source: CdfSource,
    pub zeta: ZetaPlan,
}

impl Default for Config {
    fn default() -> Self {
        load_config("").expect("built-in defaults are valid")
    }
}

impl Config {
    /// Replaces the master seed everywhere it is used.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self.sweep.master_seed = seed;
        self.cdf.master_seed = seed;
        self
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

fn combiners(names: &[String], name: &'static str) -> Result<Vec<Combiner>, ConfigError> {
    names
        .iter()
        .map(|n| Combiner::from_name(n).ok_or_else(|| field(name, format!("unknown combiner `{n}`"))))
        .collect()
}

fn counts(raw: &RawCounts, name: &'static str) -> Result<Vec<usize>, ConfigError> {
    let v = raw.expand(name)?;
    if v.is_empty() {
        return Err(field(name, "must not be empty"));
    }
    if v.contains(&0) {
        return Err(field(name, "values must be positive"));
    }
    let mut sorted = v.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != v.len() {
        return Err(field(name, "values must not repeat"));
    }
    Ok(v)
}

fn unique<T: PartialEq>(v: &[T], name: &'static str) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(field(name, "must not be empty"));
    }
    if v.iter().enumerate().any(|(i, a)| v[..i].contains(a)) {
        return Err(field(name, "values must not repeat"));
    }
    Ok(())
}

/// Parses and validates a configuration.
pub fn load_config(text: &str) -> Result<Config, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })?;

    let ex = &raw.experiment;
    if ex.trials == 0 {
        return Err(field("experiment.trials", "must be at least 1"));
    }

    let (fading, los_mean) = match raw.channel.kind.to_ascii_lowercase().as_str() {
        "rayleigh" => {
            if raw.channel.los_mean.is_some_and(|m| m != 0.0) {
                return Err(field("channel.los_mean", "must be 0 or absent for rayleigh"));
            }
            (FadingKind::RayleighWssus, 0.0)
        }
        "rice" => {
            let mean = raw.channel.los_mean.unwrap_or(1.0);
            if !(mean > 0.0 && mean.is_finite()) {
                return Err(field("channel.los_mean", "must be positive and finite for rice"));
            }
            (FadingKind::RiceWssus, mean)
        }
        other => {
            return Err(field(
                "channel.kind",
                format!("expected `rayleigh` or `rice`, got `{other}`"),
            ))
        }
    };

    let p = &raw.pulse;
    if !(0.0..=1.0).contains(&p.rolloff) {
        return Err(field("pulse.rolloff", "must lie in [0, 1]"));
    }
    if !(p.symbol_period_ns > 0.0 && p.symbol_period_ns.is_finite()) {
        return Err(field("pulse.symbol_period_ns", "must be positive and finite"));
    }
    let pulse = PulseShape::new(p.rolloff, p.symbol_period_ns * 1e-9, p.span)
        .map_err(|e| field("pulse.span", e.to_string()))?;

    let spacing_ratio = raw.array.spacing;
    if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
        return Err(field("array.spacing", "must be positive and finite"));
    }

    let s = &raw.sweep;
    let sweep_combiners = combiners(&s.combiners, "sweep.combiners")?;
    unique(&sweep_combiners, "sweep.combiners")?;
    if sweep_combiners.contains(&Combiner::BeamSteer) {
        return Err(field(
            "sweep.combiners",
            "BeamSteer needs path geometry; use it with cdf or zeta",
        ));
    }
    let egc_mode = match (s.egc_rho.as_str(), s.egc_symbols) {
        ("tap-limit", None) => EgcRhoMode::TapLimit,
        ("tap-limit", Some(_)) => return Err(field("sweep.egc_symbols", "only used with egc_rho = \"matrix\"")),
        ("matrix", Some(n)) if n > 0 => EgcRhoMode::Matrix { num_symbols: n },
        ("matrix", _) => return Err(field("sweep.egc_symbols", "matrix mode needs egc_symbols >= 1")),
        (other, _) => {
            return Err(field(
                "sweep.egc_rho",
                format!("expected `tap-limit` or `matrix`, got `{other}`"),
            ))
        }
    };
    let sweep = ExperimentConfig {
        antenna_counts: counts(&s.antenna_counts, "sweep.antenna_counts")?,
        tap_lengths: counts(&s.tap_lengths, "sweep.tap_lengths")?,
        trials: ex.trials,
        master_seed: ex.master_seed,
        fading,
        los_mean,
        combiners: sweep_combiners,
        egc_mode,
    };
    sweep.validate().map_err(|e| field("sweep", e.to_string()))?;

    let c = &raw.cdf;
    let cdf_combiners = combiners(&c.combiners, "cdf.combiners")?;
    unique(&cdf_combiners, "cdf.combiners")?;
    if c.num_taps == 0 {
        return Err(field("cdf.num_taps", "must be at least 1"));
    }
    let mrc_response = match c.mrc_response.as_str() {
        "gramian-peak-row" => MrcResponse::GramianPeakRow,
        "autocorrelation" => MrcResponse::Autocorrelation,
        other => {
            return Err(field(
                "cdf.mrc_response",
                format!("expected `gramian-peak-row` or `autocorrelation`, got `{other}`"),
            ))
        }
    };
    let cdf = CdfConfig {
        antenna_counts: counts(&c.antenna_counts, "cdf.antenna_counts")?,
        combiners: cdf_combiners,
        num_taps: c.num_taps,
        spacing_ratio,
        pulse,
        mrc_response,
        master_seed: ex.master_seed,
    };
    let cdf_source = match &c.pathlist {
        Some(path) => CdfSource::PathList(path.clone()),
        None => {
            if c.drops == 0 {
                return Err(field("cdf.drops", "must be at least 1"));
            }
            if c.min_paths == 0 || c.min_paths > c.max_paths {
                return Err(field("cdf.min_paths", "need 1 <= min_paths <= max_paths"));
            }
            if !(c.max_delay_symbols >= 0.0 && c.max_delay_symbols.is_finite()) {
                return Err(field("cdf.max_delay_symbols", "must be non-negative and finite"));
            }
            CdfSource::Synthetic(SyntheticDrops {
                drops: c.drops,
                min_paths: c.min_paths,
                max_paths: c.max_paths,
                max_delay_symbols: c.max_delay_symbols,
            })
        }
    };

    let z = &raw.zeta;
    let paths = z
        .paths
        .iter()
        .map(|p| {
            if !(0.0..=180.0).contains(&p.aoa_deg) {
                return Err(field("zeta.paths", "aoa_deg must lie in [0, 180]"));
            }
            Path::new(
                C64::new(p.gain_re, p.gain_im),
                p.delay_ns * 1e-9,
                p.aoa_deg.to_radians().min(PI),
            )
            .map_err(|e| field("zeta.paths", e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let paths = PathSet::new(paths).map_err(|_| field("zeta.paths", "must not be empty"))?;
    if let Some((i, j)) = paths.duplicate_angles() {
        return Err(field(
            "zeta.paths",
            format!("paths {i} and {j} share an angle of arrival"),
        ));
    }
    let zeta = ZetaPlan {
        paths,
        spacing_ratio,
        pulse,
        antenna_counts: counts(&z.antenna_counts, "zeta.antenna_counts")?,
    };

    Ok(Config {
        experiment_id: ex.id.clone(),
        master_seed: ex.master_seed,
        pulse,
        spacing_ratio,
        sweep,
        cdf,
        cdf_source,
        zeta,
    })
}
