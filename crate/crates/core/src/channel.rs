//! Deterministic spatial wideband channel of a uniform linear array.
//!
//! A path set `{(c_k, τ_k, α_k)}` seen through a raised-cosine transmit/receive
//! cascade and sampled at the symbol rate gives the `M × L` tap matrix
//!
//! ```text
//! h[n] = Σ_k g_{k,n} a(α_k),   g_{k,n} = c_k · p(n·T_s − τ_k)
//! ```
//!
//! i.e. `H = A · G` with `A` the `M × P` steering matrix and `G` the `P × L`
//! matrix of sampled path gains.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{CMatrix, Error, Result, C64};

/// Energy floor below which an assembled channel is considered truncated away.
pub const DEFAULT_ENERGY_FLOOR: f64 = 1e-24;

/// Half-width (in symbol periods) of the window around `|t| = T_s/(2β)` where
/// the raised cosine is replaced by its analytic limit.
const RC_SINGULARITY_GUARD: f64 = 1e-9;

/// Uniform linear array: `M` elements spaced `spacing_ratio` wavelengths apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_antennas: usize,
    spacing_ratio: f64,
}

impl ArrayGeometry {
    pub fn new(num_antennas: usize, spacing_ratio: f64) -> Result<Self> {
        if num_antennas == 0 {
            return Err(Error::InvalidParameter {
                name: "num_antennas",
                reason: "must be at least 1",
            });
        }
        if !(spacing_ratio.is_finite() && spacing_ratio > 0.0) {
            return Err(Error::InvalidParameter {
                name: "spacing_ratio",
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            num_antennas,
            spacing_ratio,
        })
    }

    /// Half-wavelength spacing.
    pub fn half_wavelength(num_antennas: usize) -> Result<Self> {
        Self::new(num_antennas, 0.5)
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }

    pub fn with_antennas(&self, num_antennas: usize) -> Result<Self> {
        Self::new(num_antennas, self.spacing_ratio)
    }
}

/// One propagation path: complex amplitude, delay in seconds, AoA in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    gain: C64,
    delay: f64,
    aoa: f64,
}

impl Path {
    pub fn new(gain: C64, delay: f64, aoa: f64) -> Result<Self> {
        if !(gain.re.is_finite() && gain.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gain",
                reason: "must be finite",
            });
        }
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "delay",
                reason: "must be finite and non-negative",
            });
        }
        if !(0.0..=PI).contains(&aoa) {
            return Err(Error::InvalidParameter {
                name: "aoa",
                reason: "must lie in [0, pi]",
            });
        }
        Ok(Self { gain, delay, aoa })
    }

    pub fn gain(&self) -> C64 {
        self.gain
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn aoa(&self) -> f64 {
        self.aoa
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self { paths })
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Index of the path with the largest `|c_k|` (first one on ties).
    pub fn strongest(&self) -> usize {
        let mut best = 0;
        for (k, p) in self.paths.iter().enumerate() {
            if p.gain.norm_sqr() > self.paths[best].gain.norm_sqr() {
                best = k;
            }
        }
        best
    }

    /// First pair of paths whose steering vectors coincide, if any.
    pub fn duplicate_angles(&self) -> Option<(usize, usize)> {
        for i in 0..self.paths.len() {
            for j in i + 1..self.paths.len() {
                if same_direction(self.paths[i].aoa, self.paths[j].aoa) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Two AoAs are indistinguishable to a ULA when their cosines agree.
pub(crate) fn same_direction(a: f64, b: f64) -> bool {
    (libm::cos(a) - libm::cos(b)).abs() < 1e-12
}

/// Raised-cosine cascade `p(t) = p_t * p_r`: roll-off, symbol period, span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    rolloff: f64,
    symbol_period: f64,
    /// Documentation only; sampling uses the exact closed form.
    span: usize,
}

impl PulseShape {
    pub fn new(rolloff: f64, symbol_period: f64, span: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&rolloff) {
            return Err(Error::InvalidParameter {
                name: "rolloff",
                reason: "must lie in [0, 1]",
            });
        }
        if !(symbol_period.is_finite() && symbol_period > 0.0) {
            return Err(Error::InvalidParameter {
                name: "symbol_period",
                reason: "must be positive and finite",
            });
        }
        if span == 0 {
            return Err(Error::InvalidParameter {
                name: "span",
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            rolloff,
            symbol_period,
            span,
        })
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    pub fn span(&self) -> usize {
        self.span
    }
}

impl Default for PulseShape {
    /// β = 0.25, unit symbol period, 8-symbol span.
    fn default() -> Self {
        Self {
            rolloff: 0.25,
            symbol_period: 1.0,
            span: 8,
        }
    }
}

/// `M × L` baud-rate tap matrix; column `n` is the tap vector `h[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: CMatrix,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.rows() == 0 {
            return Err(Error::InvalidParameter {
                name: "num_antennas",
                reason: "must be at least 1",
            });
        }
        if entries.cols() == 0 {
            return Err(Error::InvalidParameter {
                name: "num_taps",
                reason: "must be at least 1",
            });
        }
        if !entries.is_finite() {
            return Err(Error::InvalidParameter {
                name: "entries",
                reason: "must be finite",
            });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn num_antennas(&self) -> usize {
        self.entries.rows()
    }

    pub fn num_taps(&self) -> usize {
        self.entries.cols()
    }

    /// Tap vector `h[n]` across antennas.
    pub fn tap(&self, n: usize) -> Vec<C64> {
        self.entries.column(n)
    }

    /// The first `m` antennas of this channel.
    pub fn antenna_prefix(&self, m: usize) -> Result<ChannelMatrix> {
        if m == 0 || m > self.num_antennas() {
            return Err(Error::DimensionMismatch {
                expected: self.num_antennas(),
                found: m,
            });
        }
        let cols = self.num_taps();
        let data = self.entries.as_slice()[..m * cols].to_vec();
        Ok(Self {
            entries: CMatrix::from_row_major(m, cols, data)?,
        })
    }
}

/// `H = A · G`: steering matrix `A` (`M × P`), path angles, and sampled
/// gains `G` (`P × L`, column `n` is `g_n`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFactors {
    pub steering: CMatrix,
    pub gains: CMatrix,
    pub aoas: Vec<f64>,
    pub spacing_ratio: f64,
}

impl ChannelFactors {
    pub fn num_paths(&self) -> usize {
        self.gains.rows()
    }

    pub fn num_taps(&self) -> usize {
        self.gains.cols()
    }

    pub fn num_antennas(&self) -> usize {
        self.steering.rows()
    }

    /// Gain vector `g_n` over paths.
    pub fn gain_column(&self, n: usize) -> Vec<C64> {
        self.gains.column(n)
    }
}

/// `a(α)[m] = exp(−j·2π·m·(d/λ)·cos α)` for `m = 0..M`.
pub fn steering_vector(geom: &ArrayGeometry, aoa: f64) -> Vec<C64> {
    let step = -2.0 * PI * geom.spacing_ratio * libm::cos(aoa);
    (0..geom.num_antennas)
        .map(|m| C64::from_polar(1.0, step * m as f64))
        .collect()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        libm::sin(PI * x) / (PI * x)
    }
}

/// Raised-cosine impulse response normalized to `p(0) = 1`.
///
/// Nonzero integer multiples of `T_s` return exactly zero. Near
/// `|t| = T_s/(2β)` the removable singularity is replaced by its limit
/// `(π/4)·sinc(1/(2β))`.
pub fn raised_cosine_pulse(t: f64, pulse: &PulseShape) -> f64 {
    let x = t / pulse.symbol_period;
    if x == 0.0 {
        return 1.0;
    }
    if x == libm::trunc(x) {
        return 0.0;
    }
    let beta = pulse.rolloff;
    if beta > 0.0 {
        let singular = 1.0 / (2.0 * beta);
        if (x.abs() - singular).abs() < RC_SINGULARITY_GUARD {
            return PI / 4.0 * sinc(singular);
        }
    }
    let two_bx = 2.0 * beta * x;
    sinc(x) * libm::cos(PI * beta * x) / (1.0 - two_bx * two_bx)
}

/// `g_{k,n} = c_k · p(n·T_s − τ_k)`.
pub fn sampled_path_gain(path: &Path, pulse: &PulseShape, n: usize) -> C64 {
    let t = n as f64 * pulse.symbol_period - path.delay;
    path.gain * raised_cosine_pulse(t, pulse)
}

/// Builds `H = A·G` with the default energy floor.
pub fn assemble_channel(
    paths: &PathSet,
    geom: &ArrayGeometry,
    pulse: &PulseShape,
    num_taps: usize,
) -> Result<(ChannelMatrix, ChannelFactors)> {
    assemble_channel_with_floor(paths, geom, pulse, num_taps, DEFAULT_ENERGY_FLOOR)
}

/// Builds `H = A·G`, rejecting truncations whose total sampled gain energy
/// `Σ|g_{k,n}|²` falls below `energy_floor`.
pub fn assemble_channel_with_floor(
    paths: &PathSet,
    geom: &ArrayGeometry,
    pulse: &PulseShape,
    num_taps: usize,
    energy_floor: f64,
) -> Result<(ChannelMatrix, ChannelFactors)> {
    if num_taps == 0 {
        return Err(Error::InvalidParameter {
            name: "num_taps",
            reason: "must be at least 1",
        });
    }
    let p = paths.len();
    let gains = CMatrix::from_fn(p, num_taps, |k, n| sampled_path_gain(&paths.paths[k], pulse, n));
    if gains.frobenius_norm_sqr() < energy_floor {
        return Err(Error::DegenerateTruncation { num_taps });
    }

    let mut steering = CMatrix::zeros(geom.num_antennas, p);
    for (k, path) in paths.paths.iter().enumerate() {
        for (m, a) in steering_vector(geom, path.aoa).into_iter().enumerate() {
            steering[(m, k)] = a;
        }
    }
    let entries = steering.mul(&gains)?;
    let factors = ChannelFactors {
        steering,
        gains,
        aoas: paths.paths.iter().map(|p| p.aoa).collect(),
        spacing_ratio: geom.spacing_ratio,
    };
    Ok((ChannelMatrix::new(entries)?, factors))
}
