//! Repeated business-cycle game with chaotic intrinsic-time volatility.
//!
//! Each round a company's value fitness is restricted to a harmonic
//! oscillator whose frequency is set by the round's intrinsic time
//! `tau_B`; the risk-minimizing strategy is the ground state, which turns
//! `tau_B` into the variance scale of the round's return. `tau_B = 2K` is
//! driven by a power-law transform of a coupled doubling map, fed back by
//! the previous return.
//!
//! * [`oscillator`]: per-round quantum harmonic oscillator.
//! * [`dynamics`]: chaotic driver, round engine and trajectories.
//! * [`analysis`]: coarse Hölder exponents, large-deviation spectra,
//!   power-law density fits and summary statistics.
//! * [`ingest`]: dated market series from CSV.
//!
//! All numerics are generic over [`Real`] (`f32`, `f64`); the maps also run
//! on the arbitrary-precision [`Precise`]. Aliases for `f64` are provided
//! at the crate root.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod ingest;
pub mod oscillator;
pub mod precise;
pub mod scalar;

pub use error::{Error, Result};
pub use precise::Precise;
pub use scalar::{MapScalar, Real};

pub type RoundOscillator64 = oscillator::RoundOscillator<f64>;
pub type RoundOscillator32 = oscillator::RoundOscillator<f32>;
pub type GameParams64 = dynamics::GameParams<f64>;
pub type GameParams32 = dynamics::GameParams<f32>;
pub type RoundState64 = dynamics::RoundState<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type Trajectory32 = dynamics::Trajectory<f32>;
pub type Spectrum64 = analysis::Spectrum<f64>;
pub type Histogram64 = analysis::Histogram<f64>;
pub type PowerLawFit64 = analysis::PowerLawFit<f64>;
pub type SummaryStats64 = analysis::SummaryStats<f64>;
pub type DatedSeries64 = ingest::DatedSeries<f64>;
