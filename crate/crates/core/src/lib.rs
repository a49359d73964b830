//! Inter-symbol interference after linear diversity combining in large
//! receive arrays.
//!
//! The crate models the baud-rate sampled spatial channel seen by a uniform
//! linear array, generates WSSUS Rayleigh/Rice tap matrices, applies MRC,
//! EGC and beam-steered combining, and measures what is left of the ISI
//! (normalized off-diagonal power, RMS delay spread). The Monte Carlo
//! drivers in [`montecarlo`] are deterministic functions of a master seed.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the multi-threaded executor live in the `isi-sim` companion crate.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod combining;
mod error;
pub mod matrix;
pub mod metrics;
pub mod montecarlo;
pub mod stochastic;

pub use error::{Error, Result};
pub use matrix::CMatrix;

/// Complex baseband sample type used throughout the crate.
pub type C64 = num_complex::Complex64;
