//! Multifractal and distributional analysis of simulated and market series.

mod density;
mod exponents;
mod spectrum;
mod stats;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use density::{fit_power_law, log_histogram, Histogram, PowerLawFit, MIN_FIT_BINS};
pub use exponents::{coarse_exponents, CoarseExponents};
pub use spectrum::{
    default_resolutions, large_deviation_spectrum, spectrum_peak, Normalization, Spectrum,
    SpectrumCurve, SpectrumSettings,
};
pub use stats::{summary_stats, SummaryStats};

/// Log-price path `ln s0 + cumulative sum of returns`, one longer than the
/// input.
pub fn integrate_returns<T: Real>(returns: &[T], s0: T) -> Result<Vec<T>> {
    if !(s0 > T::zero() && s0.is_finite()) {
        return Err(Error::domain("s0", s0.as_f64(), "must be positive and finite"));
    }
    let mut acc = s0.ln();
    let mut out = Vec::with_capacity(returns.len() + 1);
    out.push(acc);
    for (idx, &r) in returns.iter().enumerate() {
        if !r.is_finite() {
            return Err(Error::Input(format!("return at index {idx} is not finite: {r}")));
        }
        acc = acc + r;
        out.push(acc);
    }
    Ok(out)
}

/// Running sum of intrinsic-time increments.
pub fn devils_staircase<T: Real>(tau: &[T]) -> Result<Vec<T>> {
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(tau.len());
    for (idx, &v) in tau.iter().enumerate() {
        if !(v >= T::zero() && v.is_finite()) {
            return Err(Error::Input(format!(
                "tau_B at index {idx} must be non-negative and finite, got {v}"
            )));
        }
        acc = acc + v;
        out.push(acc);
    }
    Ok(out)
}

/// How a raw column becomes the signal handed to the spectrum estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalTransform {
    /// Treat the column as returns and analyze the log-price path.
    Integrate,
    /// Analyze the column as a level series.
    Levels,
}

impl SignalTransform {
    pub fn apply<T: Real>(self, column: &[T]) -> Result<Vec<T>> {
        match self {
            SignalTransform::Integrate => integrate_returns(column, T::one()),
            SignalTransform::Levels => {
                if let Some(idx) = column.iter().position(|v| !v.is_finite()) {
                    return Err(Error::Input(format!(
                        "value at index {idx} is not finite: {}",
                        column[idx]
                    )));
                }
                Ok(column.to_vec())
            }
        }
    }

    /// Normalization used when none is requested: integrated paths are
    /// rescaled to unit range, level series are analyzed as they are.
    pub fn default_normalization(self) -> Normalization {
        match self {
            SignalTransform::Integrate => Normalization::UnitRange,
            SignalTransform::Levels => Normalization::None,
        }
    }
}
