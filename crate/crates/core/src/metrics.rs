//! ISI measures of a post-combining channel, plus the small statistics used
//! to summarize sweeps (empirical CDF, log-log line fit).

use alloc::vec::Vec;

use crate::combining::CombinedTaps;
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsiSource {
    GramianMrc,
    ConvolutionEgc,
    TapVector,
}

/// Fraction of squared Frobenius norm outside the main diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsiPower {
    pub rho: f64,
    pub matrix_shape: (usize, usize),
    pub source: IsiSource,
}

/// `ρ = ‖Ξ‖²_F / ‖Ψ‖²_F`, where `Ξ` is `Ψ` with its main diagonal zeroed.
///
/// Pass the Gramian for MRC and the convolution matrix of the averaged taps
/// for EGC.
pub fn normalized_isi_power(psi: &CMatrix, source: IsiSource) -> Result<IsiPower> {
    let total = psi.frobenius_norm_sqr();
    if total == 0.0 {
        return Err(Error::ZeroInput);
    }
    let rho = (psi.off_diagonal_norm_sqr() / total).clamp(0.0, 1.0);
    Ok(IsiPower {
        rho,
        matrix_shape: (psi.rows(), psi.cols()),
        source,
    })
}

/// Which tap of a combined response counts as the wanted one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TapReference {
    /// Strongest tap, first index on ties.
    #[default]
    Peak,
    /// Tap 0, i.e. the main diagonal of the response's convolution matrix.
    First,
}

fn peak_index(taps: &[C64]) -> usize {
    let mut best = 0;
    for (n, t) in taps.iter().enumerate() {
        if t.norm_sqr() > taps[best].norm_sqr() {
            best = n;
        }
    }
    best
}

/// `ρ = Σ_{n≠n*}|t_n|² / Σ_n|t_n|²` with `n*` the strongest tap.
pub fn tap_isi_ratio(taps: &CombinedTaps) -> Result<IsiPower> {
    tap_isi_ratio_with(&taps.taps, TapReference::Peak)
}

/// Tap-domain ISI ratio against an explicit reference tap.
///
/// With [`TapReference::First`] this equals [`normalized_isi_power`] of the
/// taps' convolution matrix for every block length, since each column of
/// that matrix carries all `L` taps with tap 0 on the diagonal.
pub fn tap_isi_ratio_with(taps: &[C64], reference: TapReference) -> Result<IsiPower> {
    if taps.is_empty() {
        return Err(Error::Empty);
    }
    let total: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::ZeroInput);
    }
    let wanted = match reference {
        TapReference::Peak => peak_index(taps),
        TapReference::First => 0,
    };
    let off: f64 = taps
        .iter()
        .enumerate()
        .filter(|(n, _)| *n != wanted)
        .map(|(_, t)| t.norm_sqr())
        .sum();
    Ok(IsiPower {
        rho: (off / total).clamp(0.0, 1.0),
        matrix_shape: (1, taps.len()),
        source: IsiSource::TapVector,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RmsDelaySpread {
    pub value: f64,
}

/// Power-weighted standard deviation of tap delays `n·T_s`.
///
/// Exactly zero when a single tap carries all the energy.
pub fn rms_delay_spread(taps: &[C64], symbol_period: f64) -> Result<RmsDelaySpread> {
    if taps.is_empty() {
        return Err(Error::Empty);
    }
    let powers: Vec<f64> = taps.iter().map(|t| t.norm_sqr()).collect();
    let total: f64 = powers.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroInput);
    }
    if powers.iter().filter(|p| **p > 0.0).count() == 1 {
        return Ok(RmsDelaySpread { value: 0.0 });
    }
    let mean: f64 = powers.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>() / total;
    let var: f64 = powers
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 - mean) * (n as f64 - mean) * p)
        .sum::<f64>()
        / total;
    Ok(RmsDelaySpread {
        value: libm::sqrt(var.max(0.0)) * symbol_period,
    })
}

/// Step-function CDF of a finite sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `F(q) = #{x ≤ q} / n`.
    pub fn evaluate(&self, q: f64) -> f64 {
        let count = self.sorted.partition_point(|x| *x <= q);
        count as f64 / self.sorted.len() as f64
    }

    /// Smallest sample `x` with `F(x) ≥ p`, for `p ∈ (0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let rank = libm::ceil(p * n as f64) as usize;
        self.sorted[rank.clamp(1, n) - 1]
    }

    /// `quantile(percent / 100)` with the rank computed in integers, so
    /// `percent = 7` is not pushed up a rank by `0.07 · 100 > 7`.
    pub fn percentile(&self, percent: u32) -> f64 {
        let n = self.sorted.len();
        let rank = (percent as usize * n).div_ceil(100);
        self.sorted[rank.clamp(1, n) - 1]
    }
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "must not contain NaN",
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn loglog_slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points
        .iter()
        .any(|(x, y)| !(x.is_finite() && y.is_finite() && *x > 0.0 && *y > 0.0))
    {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "coordinates must be positive and finite",
        });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (libm::log(*x), libm::log(*y))).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if logs.len() < 2 || sxx == 0.0 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "need at least two distinct abscissae",
        });
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = logs
            .iter()
            .map(|p| {
                let r = p.1 - intercept - slope * p.0;
                r * r
            })
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
    })
}
