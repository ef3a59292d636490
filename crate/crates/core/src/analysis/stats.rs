use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Moment summary of a series. Shape statistics are `None` when the
/// series has zero variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats<T> {
    pub n: usize,
    pub mean: T,
    pub std: T,
    pub skewness: Option<T>,
    pub excess_kurtosis: Option<T>,
    /// Autocorrelation of `|x - mean|` at lags `1..=max_lag`.
    pub acf_abs: Vec<Option<T>>,
}

/// Population moments (`1/n` normalization) and the autocorrelation of
/// absolute deviations.
pub fn summary_stats<T: Real>(series: &[T], max_lag: usize) -> Result<SummaryStats<T>> {
    if max_lag < 1 {
        return Err(Error::domain("max_lag", max_lag as f64, "must be at least 1"));
    }
    if series.len() <= max_lag {
        return Err(Error::domain(
            "max_lag",
            max_lag as f64,
            "must be smaller than the series length",
        ));
    }
    if let Some(idx) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!(
            "value at index {idx} is not finite: {}",
            series[idx]
        )));
    }
    let n = T::of_usize(series.len());
    let mean = series.iter().copied().sum::<T>() / n;
    let moment = |p: i32| series.iter().map(|&x| (x - mean).powi(p)).sum::<T>() / n;
    let m2 = moment(2);
    let std = m2.sqrt();
    let (skewness, excess_kurtosis) = if m2 > T::zero() {
        (
            Some(moment(3) / (m2 * std)),
            Some(moment(4) / (m2 * m2) - T::lit(3.0)),
        )
    } else {
        (None, None)
    };
    let dev: Vec<T> = series.iter().map(|&x| (x - mean).abs()).collect();
    let dmean = dev.iter().copied().sum::<T>() / n;
    let c0 = dev.iter().map(|&d| (d - dmean) * (d - dmean)).sum::<T>();
    let acf_abs = (1..=max_lag)
        .map(|lag| {
            (c0 > T::zero()).then(|| {
                dev.iter()
                    .zip(&dev[lag..])
                    .map(|(&a, &b)| (a - dmean) * (b - dmean))
                    .sum::<T>()
                    / c0
            })
        })
        .collect();
    Ok(SummaryStats {
        n: series.len(),
        mean,
        std,
        skewness,
        excess_kurtosis,
        acf_abs,
    })
}
