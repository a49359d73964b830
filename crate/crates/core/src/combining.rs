//! Linear diversity combiners and the correlation measures that predict how
//! much ISI survives them.
//!
//! * MRC: `r = Hᴴy`; the post-combining channel is the Gramian `HᴴH`.
//! * EGC: per-tap sample mean across antennas, optionally co-phased.
//! * Beam steering: `(1/M)·a(α)ᴴ h[n]` for a chosen look direction.
//!
//! `ζ` correlates a tap vector with a steering vector, `D` correlates two tap
//! vectors. Both have exact finite-`M` closed forms through the factorization
//! `H = A·G` and limits as `M → ∞`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::channel::{same_direction, steering_vector, ArrayGeometry, ChannelFactors, ChannelMatrix, PathSet};
use crate::stochastic::{complex_normal, TrialSeed};
use crate::{CMatrix, Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Reduced array phase below which two directions are treated as identical.
const ALIAS_TOL: f64 = 1e-12;

/// `L × L` Hermitian matrix `HᴴH`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gramian {
    entries: CMatrix,
}

impl Gramian {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    /// Index of the largest diagonal entry (first on ties).
    pub fn peak_tap(&self) -> usize {
        let mut best = 0;
        for n in 1..self.dim() {
            if self.entries[(n, n)].re > self.entries[(best, best)].re {
                best = n;
            }
        }
        best
    }
}

/// Builds `HᴴH` one antenna row at a time.
///
/// Snapshots after `M` rows are bit-identical to [`mrc_gramian`] on the
/// first `M` antennas.
#[derive(Debug, Clone)]
pub struct GramianAccumulator {
    acc: CMatrix,
    rows: usize,
}

impl GramianAccumulator {
    pub fn new(num_taps: usize) -> Self {
        Self {
            acc: CMatrix::zeros(num_taps, num_taps),
            rows: 0,
        }
    }

    pub fn push_row(&mut self, row: &[C64]) {
        let l = self.acc.rows();
        debug_assert_eq!(row.len(), l);
        for (i, zi) in row.iter().enumerate() {
            let ci = zi.conj();
            for (j, zj) in row.iter().enumerate() {
                self.acc[(i, j)] += ci * zj;
            }
        }
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn snapshot(&self) -> Gramian {
        Gramian {
            entries: self.acc.clone(),
        }
    }
}

pub fn mrc_gramian(h: &ChannelMatrix) -> Gramian {
    let mut acc = GramianAccumulator::new(h.num_taps());
    for m in 0..h.num_antennas() {
        acc.push_row(h.entries().row(m));
    }
    acc.snapshot()
}

/// One noisy observation `y = H·x + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub received: Vec<C64>,
    pub noise_variance: f64,
    pub symbols: Vec<C64>,
}

/// Draws `y = H·x + n` with `n ~ CN(0, σ²I)` from the given seed. `channel`
/// may be a tap matrix or a stacked convolution matrix.
pub fn simulate_observation(
    channel: &CMatrix,
    symbols: &[C64],
    noise_variance: f64,
    seed: TrialSeed,
) -> Result<Observation> {
    if !(noise_variance.is_finite() && noise_variance >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "noise_variance",
            reason: "must be finite and non-negative",
        });
    }
    let mut received = channel.mul_vec(symbols)?;
    if noise_variance > 0.0 {
        let sigma = libm::sqrt(noise_variance);
        let mut rng = seed.rng();
        for y in received.iter_mut() {
            *y += complex_normal(&mut rng) * sigma;
        }
    }
    Ok(Observation {
        received,
        noise_variance,
        symbols: symbols.to_vec(),
    })
}

/// MRC sufficient statistic `r = Hᴴy`.
pub fn mrc_statistic(channel: &CMatrix, received: &[C64]) -> Result<Vec<C64>> {
    channel.adjoint_mul_vec(received)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CombinerTag {
    Egc,
    EgcCophased,
    BeamSteer,
}

/// Length-`L` impulse response left after EGC or beam steering.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedTaps {
    pub taps: Vec<C64>,
    pub tag: CombinerTag,
}

/// Tap with the largest average power across antennas (first on ties).
fn strongest_tap(h: &ChannelMatrix) -> usize {
    let power = |n: usize| -> f64 { (0..h.num_antennas()).map(|m| h.entries()[(m, n)].norm_sqr()).sum() };
    let mut best = 0;
    let mut best_power = power(0);
    for n in 1..h.num_taps() {
        let p = power(n);
        if p > best_power {
            best = n;
            best_power = p;
        }
    }
    best
}

/// Equal-gain combining: tap `n` is `(1/M)·Σ_m H[m][n]`.
///
/// With `cophase`, each antenna row is first rotated so that its entry on the
/// strongest tap is real and positive. Antennas whose reference entry is
/// exactly zero are left unrotated.
pub fn egc_combine(h: &ChannelMatrix, cophase: bool) -> CombinedTaps {
    let l = h.num_taps();
    let mut sum = vec![ZERO; l];
    let reference = if cophase { Some(strongest_tap(h)) } else { None };
    for m in 0..h.num_antennas() {
        let row = h.entries().row(m);
        let rot = match reference {
            Some(n0) if row[n0] != ZERO => row[n0].conj() / row[n0].norm(),
            _ => C64::new(1.0, 0.0),
        };
        for (s, z) in sum.iter_mut().zip(row) {
            *s += if cophase { z * rot } else { *z };
        }
    }
    let scale = h.num_antennas() as f64;
    CombinedTaps {
        taps: sum.into_iter().map(|s| s / scale).collect(),
        tag: if cophase {
            CombinerTag::EgcCophased
        } else {
            CombinerTag::Egc
        },
    }
}

/// Beam-steered combining: tap `n` is `(1/M)·a(α_BS)ᴴ h[n]`.
pub fn beam_combine(h: &ChannelMatrix, geom: &ArrayGeometry, look: f64) -> Result<CombinedTaps> {
    if geom.num_antennas() != h.num_antennas() {
        return Err(Error::DimensionMismatch {
            expected: h.num_antennas(),
            found: geom.num_antennas(),
        });
    }
    let a = steering_vector(geom, look);
    let mut taps = vec![ZERO; h.num_taps()];
    for (m, am) in a.iter().enumerate() {
        let w = am.conj();
        for (t, z) in taps.iter_mut().zip(h.entries().row(m)) {
            *t += w * z;
        }
    }
    let scale = h.num_antennas() as f64;
    Ok(CombinedTaps {
        taps: taps.into_iter().map(|t| t / scale).collect(),
        tag: CombinerTag::BeamSteer,
    })
}

fn norm(v: &[C64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_tap(h: &ChannelMatrix, n: usize) -> Result<()> {
    if n >= h.num_taps() {
        return Err(Error::DimensionMismatch {
            expected: h.num_taps(),
            found: n,
        });
    }
    Ok(())
}

/// `ζ_n = h[n]ᴴ a(α_BS) / (‖h[n]‖·‖a(α_BS)‖)`.
pub fn zeta_empirical(h: &ChannelMatrix, geom: &ArrayGeometry, look: f64, n: usize) -> Result<C64> {
    check_tap(h, n)?;
    if geom.num_antennas() != h.num_antennas() {
        return Err(Error::DimensionMismatch {
            expected: h.num_antennas(),
            found: geom.num_antennas(),
        });
    }
    let tap = h.tap(n);
    let tap_norm = norm(&tap);
    if tap_norm == 0.0 {
        return Err(Error::DegenerateTap(n));
    }
    let a = steering_vector(geom, look);
    Ok(inner(&tap, &a) / (tap_norm * norm(&a)))
}

/// Phase step `2π·(d/λ)·(cos α_i − cos α_j)` between two directions, folded
/// into `(−π, π]`.
fn array_phase(spacing: f64, from: f64, to: f64) -> f64 {
    let theta = 2.0 * PI * spacing * (libm::cos(from) - libm::cos(to));
    theta - 2.0 * PI * libm::round(theta / (2.0 * PI))
}

/// `Σ_{m<M} e^{jmθ}` for a folded phase, via the Dirichlet kernel.
fn geometric_sum(theta: f64, m: usize) -> C64 {
    let mf = m as f64;
    if theta.abs() < ALIAS_TOL {
        return C64::new(mf, 0.0);
    }
    let ratio = libm::sin(mf * theta / 2.0) / libm::sin(theta / 2.0);
    C64::from_polar(ratio, (mf - 1.0) * theta / 2.0)
}

/// `a(α_i)ᴴ a(α_j)` for an `M`-element ULA.
pub fn steering_inner_product(spacing: f64, num_antennas: usize, aoa_i: f64, aoa_j: f64) -> C64 {
    geometric_sum(array_phase(spacing, aoa_i, aoa_j), num_antennas)
}

fn check_distinct_paths(factors: &ChannelFactors) -> Result<()> {
    let p = factors.aoas.len();
    for i in 0..p {
        for j in i + 1..p {
            let theta = array_phase(factors.spacing_ratio, factors.aoas[i], factors.aoas[j]);
            if theta.abs() < ALIAS_TOL {
                return Err(Error::CoincidentAngles(i, j));
            }
        }
    }
    Ok(())
}

/// `‖h[n]‖² = Σ_i Σ_j g*_{i,n} g_{j,n} a(α_i)ᴴa(α_j)` from the factors.
fn tap_norm_sqr_closed_form(factors: &ChannelFactors, g: &[C64], m: usize) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (i, gi) in g.iter().enumerate() {
        acc += gi.norm_sqr() * m as f64;
        for (j, gj) in g.iter().enumerate() {
            if i != j {
                let s = steering_inner_product(factors.spacing_ratio, m, factors.aoas[i], factors.aoas[j]);
                acc += gi.conj() * gj * s;
            }
        }
    }
    acc.re
}

/// `ζ_n` evaluated from the path gains and angles with the geometric-series
/// closed forms for `a(α_j)ᴴ a(α_BS)` and `‖h[n]‖²`. Exact for every `M`.
pub fn zeta_closed_form(factors: &ChannelFactors, geom: &ArrayGeometry, look: f64, n: usize) -> Result<C64> {
    if n >= factors.num_taps() {
        return Err(Error::DimensionMismatch {
            expected: factors.num_taps(),
            found: n,
        });
    }
    check_distinct_paths(factors)?;
    let m = geom.num_antennas();
    let g = factors.gain_column(n);
    let numerator: C64 = g
        .iter()
        .zip(&factors.aoas)
        .map(|(gj, &aj)| gj.conj() * steering_inner_product(geom.spacing_ratio(), m, aj, look))
        .sum();
    let tap_norm_sqr = tap_norm_sqr_closed_form(factors, &g, m);
    if tap_norm_sqr <= 0.0 {
        return Err(Error::DegenerateTap(n));
    }
    Ok(numerator / (libm::sqrt(tap_norm_sqr) * libm::sqrt(m as f64)))
}

/// `lim_{M→∞} ζ_n` for a path set whose paths all arrive at tap 0 when
/// steering at path `k`: `c_k*/sqrt(Σ|c_i|²)` for `n = 0`, zero otherwise.
pub fn zeta_limit(paths: &PathSet, steered: usize, n: usize) -> Result<C64> {
    if steered >= paths.len() {
        return Err(Error::DimensionMismatch {
            expected: paths.len(),
            found: steered,
        });
    }
    if let Some((i, j)) = paths.duplicate_angles() {
        return Err(Error::CoincidentAngles(i, j));
    }
    if n != 0 {
        return Ok(ZERO);
    }
    let total: f64 = paths.paths().iter().map(|p| p.gain().norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::ZeroInput);
    }
    Ok(paths.paths()[steered].gain().conj() / libm::sqrt(total))
}

/// `lim_{M→∞} ζ_n` when steering at path `k`, for arbitrary delays:
/// `g*_{k,n}/sqrt(Σ_i |g_{i,n}|²)`.
pub fn zeta_tap_limit(factors: &ChannelFactors, steered: usize, n: usize) -> Result<C64> {
    if steered >= factors.num_paths() || n >= factors.num_taps() {
        return Err(Error::DimensionMismatch {
            expected: factors.num_paths(),
            found: steered,
        });
    }
    for i in 0..factors.num_paths() {
        for j in i + 1..factors.num_paths() {
            if same_direction(factors.aoas[i], factors.aoas[j]) {
                return Err(Error::CoincidentAngles(i, j));
            }
        }
    }
    let g = factors.gain_column(n);
    let total = norm(&g);
    if total == 0.0 {
        return Err(Error::DegenerateTap(n));
    }
    Ok(g[steered].conj() / total)
}

/// `D^(M)_{m,n} = h[m]ᴴ h[n] / (‖h[m]‖·‖h[n]‖)`; exactly 1 on the diagonal.
pub fn gramian_coherence(h: &ChannelMatrix, m: usize, n: usize) -> Result<C64> {
    check_tap(h, m)?;
    check_tap(h, n)?;
    let hm = h.tap(m);
    let hn = h.tap(n);
    let (nm, nn) = (norm(&hm), norm(&hn));
    if nm == 0.0 {
        return Err(Error::DegenerateTap(m));
    }
    if nn == 0.0 {
        return Err(Error::DegenerateTap(n));
    }
    if m == n {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(inner(&hm, &hn) / (nm * nn))
}

/// `D_{m,n} = g_mᴴ g_n / sqrt((g_mᴴ g_m)(g_nᴴ g_n))`, the `M → ∞` limit of
/// [`gramian_coherence`] for pairwise-distinct angles.
pub fn coherence_limit(factors: &ChannelFactors, m: usize, n: usize) -> Result<C64> {
    for idx in [m, n] {
        if idx >= factors.num_taps() {
            return Err(Error::DimensionMismatch {
                expected: factors.num_taps(),
                found: idx,
            });
        }
    }
    let gm = factors.gain_column(m);
    let gn = factors.gain_column(n);
    let (nm, nn) = (norm(&gm), norm(&gn));
    if nm == 0.0 {
        return Err(Error::DegenerateTap(m));
    }
    if nn == 0.0 {
        return Err(Error::DegenerateTap(n));
    }
    if m == n {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(inner(&gm, &gn) / (nm * nn))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub empirical: C64,
    pub limit: C64,
}

impl CoherenceReport {
    pub fn gap(&self) -> f64 {
        (self.empirical - self.limit).norm()
    }
}

pub fn coherence_report(h: &ChannelMatrix, factors: &ChannelFactors, m: usize, n: usize) -> Result<CoherenceReport> {
    Ok(CoherenceReport {
        empirical: gramian_coherence(h, m, n)?,
        limit: coherence_limit(factors, m, n)?,
    })
}
