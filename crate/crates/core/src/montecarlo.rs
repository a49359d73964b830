//! Seeded Monte Carlo drivers: antenna sweeps, `(M, L)` surfaces, RMS delay
//! spread CDFs over path-set drops, and the `ζ` convergence table.
//!
//! Work is split by trial (or drop) index. Each unit draws only from its own
//! [`TrialSeed`] stream and results are merged in index order, so the output
//! is the same for every [`TrialExecutor`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::channel::{assemble_channel, ArrayGeometry, ChannelMatrix, Path, PathSet, PulseShape};
use crate::combining::{
    beam_combine, egc_combine, mrc_gramian, zeta_empirical, zeta_tap_limit, Gramian, GramianAccumulator,
};
use crate::metrics::{
    empirical_cdf, loglog_slope_fit, normalized_isi_power, rms_delay_spread, tap_isi_ratio_with, EmpiricalCdf,
    IsiSource, SlopeFit, TapReference,
};
use crate::stochastic::{
    build_convolution_matrix, complex_normal, derive_trial_seed, AntennaRows, FadingKind, StochasticSpec,
};
use crate::{CMatrix, Error, Result, C64};

/// Runs independent indexed jobs and returns their results in index order.
pub trait TrialExecutor {
    fn map_indexed<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every job on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl TrialExecutor for Sequential {
    fn map_indexed<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(job).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Combiner {
    Mrc,
    Egc,
    EgcCophased,
    BeamSteer,
}

impl Combiner {
    pub const ALL: [Combiner; 4] = [Combiner::Mrc, Combiner::Egc, Combiner::EgcCophased, Combiner::BeamSteer];

    pub fn name(self) -> &'static str {
        match self {
            Combiner::Mrc => "MRC",
            Combiner::Egc => "EGC",
            Combiner::EgcCophased => "EGC_cophased",
            Combiner::BeamSteer => "BeamSteer",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(name))
    }
}

/// How EGC's normalized ISI power is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EgcRhoMode {
    /// Tap-domain ratio against tap 0: the block-length-free value of the
    /// convolution-matrix `ρ`.
    #[default]
    TapLimit,
    /// `ρ` of the explicit `(N+L−1) × N` convolution matrix.
    Matrix { num_symbols: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub antenna_counts: Vec<usize>,
    pub tap_lengths: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub fading: FadingKind,
    pub los_mean: f64,
    pub combiners: Vec<Combiner>,
    pub egc_mode: EgcRhoMode,
}

impl ExperimentConfig {
    pub fn rayleigh(antenna_counts: Vec<usize>, tap_lengths: Vec<usize>, trials: usize, master_seed: u64) -> Self {
        Self {
            antenna_counts,
            tap_lengths,
            trials,
            master_seed,
            fading: FadingKind::RayleighWssus,
            los_mean: 0.0,
            combiners: vec![Combiner::Mrc],
            egc_mode: EgcRhoMode::TapLimit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1"));
        }
        if self.antenna_counts.is_empty() || self.tap_lengths.is_empty() || self.combiners.is_empty() {
            return Err(Error::InvalidConfig(
                "antenna_counts, tap_lengths and combiners must be non-empty",
            ));
        }
        if self.antenna_counts.contains(&0) || self.tap_lengths.contains(&0) {
            return Err(Error::InvalidConfig("antenna counts and tap lengths must be positive"));
        }
        if has_duplicates(&self.antenna_counts) || has_duplicates(&self.tap_lengths) || has_duplicates(&self.combiners)
        {
            return Err(Error::InvalidConfig(
                "antenna_counts, tap_lengths and combiners must not repeat",
            ));
        }
        if self.combiners.contains(&Combiner::BeamSteer) {
            return Err(Error::InvalidConfig(
                "BeamSteer needs path geometry; WSSUS sweeps support MRC and EGC only",
            ));
        }
        if let EgcRhoMode::Matrix { num_symbols: 0 } = self.egc_mode {
            return Err(Error::InvalidConfig("egc matrix mode needs at least one symbol"));
        }
        StochasticSpec::new(self.fading, self.los_mean, 1, 1)
            .map_err(|_| Error::InvalidConfig("los_mean must be > 0 for Rice and >= 0 otherwise"))?;
        Ok(())
    }

    fn sorted_antennas(&self) -> Vec<usize> {
        let mut m = self.antenna_counts.clone();
        m.sort_unstable();
        m
    }
}

fn has_duplicates<T: PartialEq>(v: &[T]) -> bool {
    v.iter().enumerate().any(|(i, a)| v[..i].contains(a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub num_antennas: usize,
    pub num_taps: usize,
    pub combiner: Combiner,
    pub mean_rho: f64,
    pub std_rho: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub num_taps: usize,
    pub combiner: Combiner,
    pub fit: SlopeFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Sorted by `(M, L, combiner)`.
    pub rows: Vec<SweepRow>,
    /// Log-log fit of mean `ρ` against `M`, per `(L, combiner)`.
    pub fits: Vec<FitRow>,
    pub master_seed: u64,
    pub trials: usize,
}

impl SweepResult {
    pub fn row(&self, num_antennas: usize, num_taps: usize, combiner: Combiner) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.num_antennas == num_antennas && r.num_taps == num_taps && r.combiner == combiner)
    }

    pub fn mean_rho(&self, num_antennas: usize, num_taps: usize, combiner: Combiner) -> Option<f64> {
        self.row(num_antennas, num_taps, combiner).map(|r| r.mean_rho)
    }

    pub fn fit(&self, num_taps: usize, combiner: Combiner) -> Option<&SlopeFit> {
        self.fits
            .iter()
            .find(|f| f.num_taps == num_taps && f.combiner == combiner)
            .map(|f| &f.fit)
    }

    /// `(M, mean ρ)` pairs for one `(L, combiner)` curve, increasing in `M`.
    pub fn curve(&self, num_taps: usize, combiner: Combiner) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter(|r| r.num_taps == num_taps && r.combiner == combiner)
            .map(|r| (r.num_antennas, r.mean_rho))
            .collect()
    }
}

fn egc_rho(taps: &[C64], mode: EgcRhoMode) -> Result<f64> {
    match mode {
        EgcRhoMode::TapLimit => Ok(tap_isi_ratio_with(taps, TapReference::First)?.rho),
        EgcRhoMode::Matrix { num_symbols } => {
            let conv = build_convolution_matrix(taps, num_symbols)?;
            Ok(normalized_isi_power(conv.entries(), IsiSource::ConvolutionEgc)?.rho)
        }
    }
}

/// `ρ` for every cell of one trial, ordered by (config tap length, increasing
/// `M`, config combiner order).
///
/// One antenna-major channel of `M_max` rows is drawn per tap length; smaller
/// arrays are its prefixes, so MRC and plain EGC are accumulated row by row.
pub fn trial_rhos(config: &ExperimentConfig, trial: usize) -> Result<Vec<f64>> {
    let antennas = config.sorted_antennas();
    let m_max = *antennas.last().ok_or(Error::Empty)?;
    let seed = derive_trial_seed(config.master_seed, trial as u64);
    let mut out = Vec::with_capacity(antennas.len() * config.tap_lengths.len() * config.combiners.len());

    let wants = |c| config.combiners.contains(&c);
    for &l in &config.tap_lengths {
        let spec = StochasticSpec::new(config.fading, config.los_mean, m_max, l)?;
        let mut rows = AntennaRows::new(&spec, seed);
        let mut gram = GramianAccumulator::new(l);
        let mut sum = vec![C64::new(0.0, 0.0); l];
        let mut stored: Vec<C64> = Vec::new();
        let mut row = vec![C64::new(0.0, 0.0); l];
        let mut next = 0;

        for m in 1..=m_max {
            rows.next_row_into(&mut row);
            if wants(Combiner::Mrc) {
                gram.push_row(&row);
            }
            if wants(Combiner::Egc) {
                for (s, z) in sum.iter_mut().zip(&row) {
                    *s += *z;
                }
            }
            if wants(Combiner::EgcCophased) {
                stored.extend_from_slice(&row);
            }
            if antennas[next] != m {
                continue;
            }
            next += 1;
            for &combiner in &config.combiners {
                let rho = match combiner {
                    Combiner::Mrc => normalized_isi_power(gram.snapshot().entries(), IsiSource::GramianMrc)?.rho,
                    Combiner::Egc => {
                        let taps: Vec<C64> = sum.iter().map(|s| s / m as f64).collect();
                        egc_rho(&taps, config.egc_mode)?
                    }
                    Combiner::EgcCophased => {
                        let prefix = ChannelMatrix::new(CMatrix::from_row_major(m, l, stored.clone())?)?;
                        egc_rho(&egc_combine(&prefix, true).taps, config.egc_mode)?
                    }
                    Combiner::BeamSteer => return Err(Error::InvalidConfig("BeamSteer is not a WSSUS combiner")),
                };
                out.push(rho);
            }
        }
    }
    Ok(out)
}

fn mean_and_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

/// Mean and spread of `ρ` over trials for every `(M, L, combiner)` cell.
pub fn run_antenna_sweep<E: TrialExecutor>(config: &ExperimentConfig, exec: &E) -> Result<SweepResult> {
    config.validate()?;
    let per_trial: Vec<Result<Vec<f64>>> = exec.map_indexed(config.trials, |t| trial_rhos(config, t));
    let per_trial: Vec<Vec<f64>> = per_trial.into_iter().collect::<Result<_>>()?;

    let antennas = config.sorted_antennas();
    let mut rows = Vec::new();
    let mut cell = 0;
    for &l in &config.tap_lengths {
        for &m in &antennas {
            for &combiner in &config.combiners {
                let (mean_rho, std_rho) = mean_and_std(per_trial.iter().map(|t| t[cell]));
                rows.push(SweepRow {
                    num_antennas: m,
                    num_taps: l,
                    combiner,
                    mean_rho,
                    std_rho,
                    trials: config.trials,
                });
                cell += 1;
            }
        }
    }
    rows.sort_by(|a, b| (a.num_antennas, a.num_taps, a.combiner).cmp(&(b.num_antennas, b.num_taps, b.combiner)));

    let mut tap_lengths = config.tap_lengths.clone();
    tap_lengths.sort_unstable();
    let mut combiners = config.combiners.clone();
    combiners.sort_unstable();
    let mut fits = Vec::new();
    for &l in &tap_lengths {
        for &combiner in &combiners {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.num_taps == l && r.combiner == combiner)
                .map(|r| (r.num_antennas as f64, r.mean_rho))
                .collect();
            if let Ok(fit) = loglog_slope_fit(&points) {
                fits.push(FitRow {
                    num_taps: l,
                    combiner,
                    fit,
                });
            }
        }
    }

    Ok(SweepResult {
        rows,
        fits,
        master_seed: config.master_seed,
        trials: config.trials,
    })
}

/// The full `(M, L)` grid of mean `ρ`; same computation as the antenna sweep.
pub fn run_surface<E: TrialExecutor>(config: &ExperimentConfig, exec: &E) -> Result<SweepResult> {
    run_antenna_sweep(config, exec)
}

/// Post-MRC response used for the delay spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MrcResponse {
    /// Row of the Gramian at its largest diagonal entry, scaled by that entry.
    #[default]
    GramianPeakRow,
    /// Full matched-filter autocorrelation `R[ℓ] = Σ_n h[n]ᴴ h[n+ℓ]`,
    /// `ℓ = −(L−1)…L−1`.
    Autocorrelation,
}

pub fn mrc_response(gram: &Gramian, mode: MrcResponse) -> Vec<C64> {
    let l = gram.dim();
    let g = gram.entries();
    match mode {
        MrcResponse::GramianPeakRow => {
            let k = gram.peak_tap();
            let scale = g[(k, k)].re;
            g.row(k).iter().map(|z| z / scale).collect()
        }
        MrcResponse::Autocorrelation => (0..2 * l - 1)
            .map(|idx| {
                let lag = idx as isize - (l as isize - 1);
                (0..l as isize)
                    .filter(|n| (0..l as isize).contains(&(n + lag)))
                    .map(|n| g[(n as usize, (n + lag) as usize)])
                    .sum()
            })
            .collect(),
    }
}

/// Random path-set drops: `P` uniform in `min_paths..=max_paths`, gains
/// `CN(0,1)`, delays uniform on `[0, max_delay_symbols·T_s]`, AoA uniform on
/// `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticDrops {
    pub drops: usize,
    pub min_paths: usize,
    pub max_paths: usize,
    pub max_delay_symbols: f64,
}

impl SyntheticDrops {
    pub fn generate(&self, master_seed: u64, drop: usize, symbol_period: f64) -> Result<PathSet> {
        let mut rng = derive_trial_seed(master_seed, drop as u64).rng();
        let count = rng.random_range(self.min_paths..=self.max_paths);
        let paths = (0..count)
            .map(|_| {
                let gain = complex_normal(&mut rng);
                let delay = rng.random::<f64>() * self.max_delay_symbols * symbol_period;
                let aoa = rng.random::<f64>() * PI;
                Path::new(gain, delay, aoa)
            })
            .collect::<Result<Vec<_>>>()?;
        PathSet::new(paths)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DropSource {
    Paths(Vec<PathSet>),
    Synthetic(SyntheticDrops),
}

impl DropSource {
    pub fn drop_count(&self) -> usize {
        match self {
            DropSource::Paths(p) => p.len(),
            DropSource::Synthetic(s) => s.drops,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfConfig {
    pub antenna_counts: Vec<usize>,
    pub combiners: Vec<Combiner>,
    pub num_taps: usize,
    pub spacing_ratio: f64,
    pub pulse: PulseShape,
    pub mrc_response: MrcResponse,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    pub num_antennas: usize,
    pub combiner: Combiner,
    pub cdf: EmpiricalCdf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfResult {
    /// Sorted by `(M, combiner)`.
    pub curves: Vec<CdfCurve>,
    pub drops: usize,
    pub master_seed: u64,
}

impl CdfResult {
    pub fn curve(&self, num_antennas: usize, combiner: Combiner) -> Option<&EmpiricalCdf> {
        self.curves
            .iter()
            .find(|c| c.num_antennas == num_antennas && c.combiner == combiner)
            .map(|c| &c.cdf)
    }
}

/// RMS delay spread after each configured combiner for one path set, ordered
/// by (sorted `M`, sorted combiner).
pub fn drop_delay_spreads(config: &CdfConfig, paths: &PathSet) -> Result<Vec<f64>> {
    let mut antennas = config.antenna_counts.clone();
    antennas.sort_unstable();
    let mut combiners = config.combiners.clone();
    combiners.sort_unstable();
    let ts = config.pulse.symbol_period();
    let look = paths.paths()[paths.strongest()].aoa();

    let mut out = Vec::with_capacity(antennas.len() * combiners.len());
    for &m in &antennas {
        let geom = ArrayGeometry::new(m, config.spacing_ratio)?;
        let (h, _) = assemble_channel(paths, &geom, &config.pulse, config.num_taps)?;
        for &combiner in &combiners {
            let response = match combiner {
                Combiner::Mrc => mrc_response(&mrc_gramian(&h), config.mrc_response),
                Combiner::Egc => egc_combine(&h, false).taps,
                Combiner::EgcCophased => egc_combine(&h, true).taps,
                Combiner::BeamSteer => beam_combine(&h, &geom, look)?.taps,
            };
            out.push(rms_delay_spread(&response, ts)?.value);
        }
    }
    Ok(out)
}

/// RMS delay spread CDFs over all drops, per `(M, combiner)`.
pub fn run_cdf_experiment<E: TrialExecutor>(config: &CdfConfig, source: &DropSource, exec: &E) -> Result<CdfResult> {
    if config.antenna_counts.is_empty() || config.combiners.is_empty() {
        return Err(Error::InvalidConfig("antenna_counts and combiners must be non-empty"));
    }
    if has_duplicates(&config.antenna_counts) || has_duplicates(&config.combiners) {
        return Err(Error::InvalidConfig("antenna_counts and combiners must not repeat"));
    }
    if config.num_taps == 0 {
        return Err(Error::InvalidConfig("num_taps must be at least 1"));
    }
    let drops = source.drop_count();
    if drops == 0 {
        return Err(Error::InvalidConfig("path source has no drops"));
    }
    if let DropSource::Synthetic(s) = source {
        if s.min_paths == 0 || s.min_paths > s.max_paths || s.max_delay_symbols.is_nan() || s.max_delay_symbols < 0.0 {
            return Err(Error::InvalidConfig(
                "synthetic drops need 1 <= min_paths <= max_paths and max_delay >= 0",
            ));
        }
    }
    let per_drop: Vec<Result<Vec<f64>>> = exec.map_indexed(drops, |d| match source {
        DropSource::Paths(p) => drop_delay_spreads(config, &p[d]),
        DropSource::Synthetic(s) => {
            let paths = s.generate(config.master_seed, d, config.pulse.symbol_period())?;
            drop_delay_spreads(config, &paths)
        }
    });
    let per_drop: Vec<Vec<f64>> = per_drop.into_iter().collect::<Result<_>>()?;

    let mut antennas = config.antenna_counts.clone();
    antennas.sort_unstable();
    let mut combiners = config.combiners.clone();
    combiners.sort_unstable();
    let mut curves = Vec::new();
    let mut cell = 0;
    for &m in &antennas {
        for &combiner in &combiners {
            let samples: Vec<f64> = per_drop.iter().map(|d| d[cell]).collect();
            curves.push(CdfCurve {
                num_antennas: m,
                combiner,
                cdf: empirical_cdf(&samples)?,
            });
            cell += 1;
        }
    }
    Ok(CdfResult {
        curves,
        drops,
        master_seed: config.master_seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaGapRow {
    pub num_antennas: usize,
    pub steered: usize,
    pub zeta: C64,
    pub limit: C64,
    pub gap: f64,
}

/// `|ζ^(M)_0 − lim ζ_0|` when steering at each path in turn, for every `M`.
/// Rows are ordered by `(steered, M)` with `M` increasing.
pub fn run_zeta_convergence(
    paths: &PathSet,
    spacing_ratio: f64,
    pulse: &PulseShape,
    antenna_counts: &[usize],
) -> Result<Vec<ZetaGapRow>> {
    if let Some((i, j)) = paths.duplicate_angles() {
        return Err(Error::CoincidentAngles(i, j));
    }
    if antenna_counts.is_empty() {
        return Err(Error::InvalidConfig("antenna_counts must be non-empty"));
    }
    let mut antennas = antenna_counts.to_vec();
    antennas.sort_unstable();
    antennas.dedup();

    let mut rows = Vec::new();
    for steered in 0..paths.len() {
        let look = paths.paths()[steered].aoa();
        for &m in &antennas {
            let geom = ArrayGeometry::new(m, spacing_ratio)?;
            let (h, factors) = assemble_channel(paths, &geom, pulse, 1)?;
            let zeta = zeta_empirical(&h, &geom, look, 0)?;
            let limit = zeta_tap_limit(&factors, steered, 0)?;
            rows.push(ZetaGapRow {
                num_antennas: m,
                steered,
                zeta,
                limit,
                gap: (zeta - limit).norm(),
            });
        }
    }
    Ok(rows)
}

/// Whether every steered path's gap sequence is non-increasing in `M`, up to
/// rounding noise of `1e-12`.
pub fn gaps_non_increasing(rows: &[ZetaGapRow]) -> bool {
    rows.windows(2)
        .filter(|w| w[0].steered == w[1].steered)
        .all(|w| w[1].gap <= w[0].gap + 1e-12)
}
