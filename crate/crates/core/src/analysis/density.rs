use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Fewest nonempty bins accepted by [`fit_power_law`], and fewest bins
/// accepted by [`log_histogram`].
pub const MIN_FIT_BINS: usize = 8;

/// Relative widening applied when every sample is equal.
const DEGENERATE_WIDENING: f64 = 1e-9;

/// Histogram on logarithmically spaced bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    /// `bin_count + 1` edges, ascending.
    pub edges: Vec<T>,
    /// Geometric bin centers.
    pub centers: Vec<T>,
    pub counts: Vec<usize>,
    /// `count / (n * width)`.
    pub densities: Vec<T>,
}

impl<T: Real> Histogram<T> {
    pub fn widths(&self) -> Vec<T> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub bin_count: usize,
}

/// Log-spaced histogram over `[min, max]` of strictly positive samples.
pub fn log_histogram<T: Real>(samples: &[T], bin_count: usize) -> Result<Histogram<T>> {
    if bin_count < MIN_FIT_BINS {
        return Err(Error::domain(
            "bins",
            bin_count as f64,
            "must be at least 8",
        ));
    }
    if samples.is_empty() {
        return Err(Error::Input("no samples to histogram".into()));
    }
    for (idx, &v) in samples.iter().enumerate() {
        if !(v > T::zero() && v.is_finite()) {
            return Err(Error::Input(format!(
                "sample at index {idx} must be positive and finite, got {v}"
            )));
        }
    }
    let mut lo = samples.iter().copied().fold(T::infinity(), T::min);
    let mut hi = samples.iter().copied().fold(T::neg_infinity(), T::max);
    if hi <= lo {
        let w = T::lit(DEGENERATE_WIDENING);
        lo = lo * (T::one() - w);
        hi = hi * (T::one() + w);
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let span = lhi - llo;
    let bins = T::of_usize(bin_count);
    let mut counts = vec![0usize; bin_count];
    for &v in samples {
        let pos = ((v.ln() - llo) / span * bins).floor();
        let idx = pos.to_usize().unwrap_or(0).min(bin_count - 1);
        counts[idx] += 1;
    }
    let mut edges: Vec<T> = (0..=bin_count)
        .map(|k| (llo + span * T::of_usize(k) / bins).exp())
        .collect();
    edges[0] = lo;
    edges[bin_count] = hi;
    let n = T::of_usize(samples.len());
    let centers = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    let densities = edges
        .windows(2)
        .zip(&counts)
        .map(|(w, &c)| T::of_usize(c) / (n * (w[1] - w[0])))
        .collect();
    Ok(Histogram {
        edges,
        centers,
        counts,
        densities,
    })
}

/// Least-squares line through `(ln center, ln density)` of the nonempty bins.
pub fn fit_power_law<T: Real>(h: &Histogram<T>) -> Result<PowerLawFit<T>> {
    let pts: Vec<(T, T)> = h
        .centers
        .iter()
        .zip(&h.densities)
        .zip(&h.counts)
        .filter(|(_, &c)| c > 0)
        .map(|((&x, &d), _)| (x.ln(), d.ln()))
        .collect();
    if pts.len() < MIN_FIT_BINS {
        return Err(Error::Analysis(format!(
            "power-law fit needs at least {MIN_FIT_BINS} nonempty bins, found {}",
            pts.len()
        )));
    }
    let n = T::of_usize(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let syy = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum::<T>();
    if !(sxx > T::zero()) {
        return Err(Error::Analysis("bin centers are not distinct".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > T::zero() {
        let ss_res = pts
            .iter()
            .map(|p| {
                let e = p.1 - (intercept + slope * p.0);
                e * e
            })
            .sum::<T>();
        (T::one() - ss_res / syy).max(T::zero()).min(T::one())
    } else {
        T::one()
    };
    Ok(PowerLawFit {
        slope,
        intercept,
        r_squared,
        bin_count: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_value_lands_in_one_bin() {
        let h = log_histogram(&[2.0f64; 10], 8).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 10);
        assert!((h.edges[0] - 2.0 * (1.0 - 1e-9)).abs() < 1e-15);
        let total: f64 = h.densities.iter().zip(h.widths()).map(|(d, w)| d * w).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn input_errors() {
        assert!(log_histogram(&[1.0f64, 2.0], 7).is_err());
        let err = log_histogram(&[1.0f64, 0.0, 2.0], 8).unwrap_err();
        assert!(err.to_string().contains("index 1"));
        let h = log_histogram(&[1.0f64, 2.0, 3.0, 4.0, 5.0], 8).unwrap();
        assert!(matches!(fit_power_law(&h), Err(Error::Analysis(_))));
    }

    #[test]
    fn exact_power_law_points() {
        // Densities placed exactly on c^-2 give slope -2 and r^2 = 1.
        let centers: Vec<f64> = (0..10).map(|k| 1.5f64.powi(k)).collect();
        let h = Histogram {
            edges: vec![0.0; 11],
            densities: centers.iter().map(|c| 3.0 / (c * c)).collect(),
            counts: vec![1; 10],
            centers,
        };
        let fit = fit_power_law(&h).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }
}
