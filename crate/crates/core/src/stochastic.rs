//! WSSUS Rayleigh/Rice tap generators and the per-branch convolution model.
//!
//! Every random draw in the crate comes from a [`TrialSeed`]: a ChaCha20
//! stream keyed by the master seed and selected by the trial index, so a
//! trial's output does not depend on which thread runs it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelMatrix;
use crate::{CMatrix, Error, Result, C64};

/// Name of the generator recorded next to every result.
pub const RNG_NAME: &str = "chacha20-key_le64-stream_trial";

/// Identifies one independent random stream: `(master_seed, trial_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialSeed {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl TrialSeed {
    /// Fresh generator positioned at the start of this trial's stream.
    ///
    /// Key = `master_seed` little-endian in bytes 0..8, zeros elsewhere;
    /// ChaCha stream id = `trial_index`. Distinct pairs never share a stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(self.trial_index);
        rng
    }
}

pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> TrialSeed {
    TrialSeed {
        master_seed,
        trial_index,
    }
}

/// Circularly-symmetric `CN(0, 1)` sample.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingKind {
    RayleighWssus,
    RiceWssus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticSpec {
    kind: FadingKind,
    los_mean: f64,
    num_taps: usize,
    num_antennas: usize,
}

impl StochasticSpec {
    pub fn new(kind: FadingKind, los_mean: f64, num_antennas: usize, num_taps: usize) -> Result<Self> {
        if num_antennas == 0 || num_taps == 0 {
            return Err(Error::InvalidParameter {
                name: "dimensions",
                reason: "num_antennas and num_taps must be at least 1",
            });
        }
        if !(los_mean.is_finite() && los_mean >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "los_mean",
                reason: "must be finite and non-negative",
            });
        }
        if kind == FadingKind::RiceWssus && los_mean == 0.0 {
            return Err(Error::InvalidParameter {
                name: "los_mean",
                reason: "Rice fading needs a positive LOS mean; use Rayleigh for zero",
            });
        }
        Ok(Self {
            kind,
            los_mean,
            num_taps,
            num_antennas,
        })
    }

    pub fn rayleigh(num_antennas: usize, num_taps: usize) -> Result<Self> {
        Self::new(FadingKind::RayleighWssus, 0.0, num_antennas, num_taps)
    }

    pub fn rice(num_antennas: usize, num_taps: usize, los_mean: f64) -> Result<Self> {
        Self::new(FadingKind::RiceWssus, los_mean, num_antennas, num_taps)
    }

    pub fn kind(&self) -> FadingKind {
        self.kind
    }

    pub fn los_mean(&self) -> f64 {
        self.los_mean
    }

    pub fn num_taps(&self) -> usize {
        self.num_taps
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// Mean of tap 0 (zero for Rayleigh).
    fn tap0_mean(&self) -> f64 {
        match self.kind {
            FadingKind::RayleighWssus => 0.0,
            FadingKind::RiceWssus => self.los_mean,
        }
    }
}

/// Streams antenna rows of a WSSUS channel, `L` taps per row.
///
/// Rows are drawn antenna-major from the trial stream, so the first `M`
/// rows are the same whatever total antenna count is eventually consumed.
pub struct AntennaRows {
    rng: ChaCha20Rng,
    num_taps: usize,
    tap0_mean: f64,
}

impl AntennaRows {
    pub fn new(spec: &StochasticSpec, seed: TrialSeed) -> Self {
        Self {
            rng: seed.rng(),
            num_taps: spec.num_taps,
            tap0_mean: spec.tap0_mean(),
        }
    }

    pub fn next_row_into(&mut self, row: &mut [C64]) {
        debug_assert_eq!(row.len(), self.num_taps);
        for z in row.iter_mut() {
            *z = complex_normal(&mut self.rng);
        }
        row[0].re += self.tap0_mean;
    }
}

impl Iterator for AntennaRows {
    type Item = Vec<C64>;

    fn next(&mut self) -> Option<Vec<C64>> {
        let mut row = vec![C64::new(0.0, 0.0); self.num_taps];
        self.next_row_into(&mut row);
        Some(row)
    }
}

fn generate(spec: &StochasticSpec, seed: TrialSeed) -> Result<ChannelMatrix> {
    let mut rows = AntennaRows::new(spec, seed);
    let mut entries = CMatrix::zeros(spec.num_antennas, spec.num_taps);
    let mut row = vec![C64::new(0.0, 0.0); spec.num_taps];
    for m in 0..spec.num_antennas {
        rows.next_row_into(&mut row);
        for (n, z) in row.iter().enumerate() {
            entries[(m, n)] = *z;
        }
    }
    ChannelMatrix::new(entries)
}

/// i.i.d. `CN(0, 1)` entries.
pub fn gen_rayleigh_wssus(spec: &StochasticSpec, seed: TrialSeed) -> Result<ChannelMatrix> {
    if spec.kind != FadingKind::RayleighWssus {
        return Err(Error::InvalidParameter {
            name: "kind",
            reason: "expected Rayleigh WSSUS",
        });
    }
    generate(spec, seed)
}

/// Tap 0 is `μ + CN(0, 1)`, the others `CN(0, 1)`. No power renormalization.
pub fn gen_rice_wssus(spec: &StochasticSpec, seed: TrialSeed) -> Result<ChannelMatrix> {
    if spec.kind != FadingKind::RiceWssus {
        return Err(Error::InvalidParameter {
            name: "kind",
            reason: "expected Rice WSSUS",
        });
    }
    generate(spec, seed)
}

/// Dispatches on `spec.kind()`.
pub fn gen_wssus(spec: &StochasticSpec, seed: TrialSeed) -> Result<ChannelMatrix> {
    generate(spec, seed)
}

/// Banded Toeplitz `(N+L−1) × N` matrix of one branch's taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionMatrix {
    entries: CMatrix,
    num_taps: usize,
}

impl ConvolutionMatrix {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn block_rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn block_cols(&self) -> usize {
        self.entries.cols()
    }

    pub fn num_taps(&self) -> usize {
        self.num_taps
    }
}

/// Entry `(k, l)` is `taps[k − l]` when `0 ≤ k − l < L`, zero otherwise.
pub fn build_convolution_matrix(taps: &[C64], num_symbols: usize) -> Result<ConvolutionMatrix> {
    if taps.is_empty() {
        return Err(Error::Empty);
    }
    if num_symbols == 0 {
        return Err(Error::InvalidParameter {
            name: "num_symbols",
            reason: "must be at least 1",
        });
    }
    let l = taps.len();
    let entries = CMatrix::from_fn(num_symbols + l - 1, num_symbols, |k, col| match k.checked_sub(col) {
        Some(d) if d < l => taps[d],
        _ => C64::new(0.0, 0.0),
    });
    Ok(ConvolutionMatrix { entries, num_taps: l })
}

/// Stacks the per-antenna convolution matrices `[H_1; …; H_M]` into the
/// `M(N+L−1) × N` observation matrix.
pub fn stacked_convolution(channel: &ChannelMatrix, num_symbols: usize) -> Result<CMatrix> {
    let l = channel.num_taps();
    let block = num_symbols + l - 1;
    let mut out = CMatrix::zeros(channel.num_antennas() * block, num_symbols);
    for m in 0..channel.num_antennas() {
        let conv = build_convolution_matrix(channel.entries().row(m), num_symbols)?;
        for k in 0..block {
            for col in 0..num_symbols {
                out[(m * block + k, col)] = conv.entries[(k, col)];
            }
        }
    }
    Ok(out)
}
