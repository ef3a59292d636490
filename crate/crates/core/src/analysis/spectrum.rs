use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exponents::{coarse_exponents, CoarseExponents};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rescaling applied to the signal before coarse-graining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Affine map onto `[0, 1]`.
    UnitRange,
    None,
}

/// Estimator settings shared by every resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSettings {
    /// Box sizes; `None` picks them from the signal length.
    pub resolutions: Option<Vec<usize>>,
    /// Kernel bandwidth; `None` uses `1.06 std n^(-1/5)` per resolution,
    /// floored at `grid_step`.
    pub bandwidth: Option<f64>,
    /// Spacing of the automatic alpha grid.
    pub grid_step: f64,
    /// Explicit alpha grid, overriding the automatic one.
    pub alpha_grid: Option<Vec<f64>>,
    pub normalization: Normalization,
    /// Resolutions with fewer valid boxes are skipped.
    pub min_boxes: usize,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        Self {
            resolutions: None,
            bandwidth: None,
            grid_step: 0.005,
            alpha_grid: None,
            normalization: Normalization::None,
            min_boxes: 50,
        }
    }
}

impl SpectrumSettings {
    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }
}

/// Spectrum estimate at one box size.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve<T> {
    pub box_size: usize,
    pub delta: T,
    pub bandwidth: T,
    /// Valid (nonzero-oscillation) boxes.
    pub boxes: usize,
    pub dropped: usize,
    /// `(alpha, f)` on the grid, ascending in alpha, finite values only.
    pub points: Vec<(T, T)>,
}

impl<T: Real> SpectrumCurve<T> {
    /// Argmax of `f`, ties going to the smaller alpha.
    pub fn peak(&self) -> Option<(T, T)> {
        let (&first, rest) = self.points.split_first()?;
        Some(rest.iter().fold(first, |best, &(a, f)| {
            if f > best.1 || (f == best.1 && a < best.0) {
                (a, f)
            } else {
                best
            }
        }))
    }
}

/// Large-deviation spectrum over several resolutions.
///
/// Curves run from the coarsest box size to the finest; the peak is read
/// off the finest curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub curves: Vec<SpectrumCurve<T>>,
    pub peak_alpha: T,
    pub peak_f: T,
    /// Box size of the curve holding the peak.
    pub peak_box_size: usize,
}

impl<T: Real> Spectrum<T> {
    /// Orders the curves coarsest first and locates the peak.
    pub fn from_curves(mut curves: Vec<SpectrumCurve<T>>) -> Result<Self> {
        curves.sort_by_key(|c| std::cmp::Reverse(c.box_size));
        let mut s = Spectrum {
            curves,
            peak_alpha: T::nan(),
            peak_f: T::nan(),
            peak_box_size: 0,
        };
        let (alpha, f) = spectrum_peak(&s)?;
        s.peak_alpha = alpha;
        s.peak_f = f;
        s.peak_box_size = s.finest().map_or(0, |c| c.box_size);
        Ok(s)
    }

    pub fn finest(&self) -> Option<&SpectrumCurve<T>> {
        self.curves.last()
    }

    /// Every `(alpha, f, box_size)` triple.
    pub fn points(&self) -> impl Iterator<Item = (T, T, usize)> + '_ {
        self.curves
            .iter()
            .flat_map(|c| c.points.iter().map(move |&(a, f)| (a, f, c.box_size)))
    }

    pub fn dropped_boxes(&self) -> Vec<(usize, usize)> {
        self.curves.iter().map(|c| (c.box_size, c.dropped)).collect()
    }

    /// True when the finest curve has a grid point with `alpha > threshold`
    /// and `f >= 0`, i.e. a set of boxes with that exponent whose count
    /// does not vanish as the boxes shrink.
    pub fn supports_alpha_above(&self, threshold: T) -> bool {
        self.finest().is_some_and(|c| {
            c.points
                .iter()
                .any(|&(a, f)| a > threshold && f >= T::zero())
        })
    }
}

/// Argmax of `f` over the finest curve. Ties go to the smaller alpha.
pub fn spectrum_peak<T: Real>(s: &Spectrum<T>) -> Result<(T, T)> {
    s.finest()
        .and_then(SpectrumCurve::peak)
        .ok_or_else(|| Error::Analysis("spectrum is empty".into()))
}

/// Box sizes for a signal with `increments` increments: the largest power
/// of two leaving at least `min_boxes` boxes, then halvings of it, at most
/// four sizes and none below 2.
pub fn default_resolutions(increments: usize, min_boxes: usize) -> Vec<usize> {
    let cap = increments / min_boxes.max(1);
    if cap < 2 {
        return Vec::new();
    }
    let top = 1usize << (usize::BITS - 1 - cap.leading_zeros());
    let mut out: Vec<usize> = std::iter::successors(Some(top), |&n| Some(n / 2))
        .take_while(|&n| n >= 2)
        .take(4)
        .collect();
    out.reverse();
    out
}

fn normalize<T: Real>(signal: &[T], mode: Normalization) -> Vec<T> {
    match mode {
        Normalization::None => signal.to_vec(),
        Normalization::UnitRange => {
            let lo = signal.iter().copied().fold(T::infinity(), T::min);
            let hi = signal.iter().copied().fold(T::neg_infinity(), T::max);
            let span = hi - lo;
            if span > T::zero() && span.is_finite() {
                signal.iter().map(|&v| (v - lo) / span).collect()
            } else {
                signal.to_vec()
            }
        }
    }
}

fn std_dev<T: Real>(xs: &[T]) -> T {
    let n = T::of_usize(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    (xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n).sqrt()
}

fn auto_grid<T: Real>(sets: &[CoarseExponents<T>], pad: T, step: T) -> Vec<T> {
    let lo = sets
        .iter()
        .flat_map(|c| c.alphas.iter().copied())
        .fold(T::infinity(), T::min);
    let hi = sets
        .iter()
        .flat_map(|c| c.alphas.iter().copied())
        .fold(T::neg_infinity(), T::max);
    let first = ((lo - pad) / step).floor().to_i64().unwrap_or(0);
    let last = ((hi + pad) / step).ceil().to_i64().unwrap_or(0);
    (first..=last)
        .map(|k| T::lit(k as f64) * step)
        .collect()
}

fn kde_curve<T: Real>(c: &CoarseExponents<T>, bandwidth: T, grid: &[T]) -> SpectrumCurve<T> {
    let m = T::of_usize(c.alphas.len());
    let norm = m * bandwidth * (T::TAU()).sqrt();
    let half = T::lit(0.5);
    let scale = -c.delta.ln();
    let points = grid
        .par_iter()
        .map(|&g| {
            let dens = c
                .alphas
                .iter()
                .map(|&a| {
                    let z = (g - a) / bandwidth;
                    (-half * z * z).exp()
                })
                .sum::<T>()
                / norm;
            (g, T::one() + dens.ln() / scale)
        })
        .filter(|(_, f)| f.is_finite())
        .collect();
    SpectrumCurve {
        box_size: c.box_size,
        delta: c.delta,
        bandwidth,
        boxes: c.alphas.len(),
        dropped: c.dropped,
        points,
    }
}

/// Kernel estimate of `f(alpha) = 1 + ln p(alpha) / ln(1/delta)` at each
/// resolution, where `p` is the density of the coarse exponents.
///
/// Results do not depend on the number of worker threads.
pub fn large_deviation_spectrum<T: Real>(
    signal: &[T],
    settings: &SpectrumSettings,
) -> Result<Spectrum<T>> {
    if signal.len() < 2 {
        return Err(Error::Analysis("signal needs at least two samples".into()));
    }
    if !(settings.grid_step > 0.0 && settings.grid_step.is_finite()) {
        return Err(Error::domain("grid_step", settings.grid_step, "must be positive"));
    }
    if let Some(h) = settings.bandwidth {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain("bandwidth", h, "must be positive"));
        }
    }
    let resolutions = match &settings.resolutions {
        Some(r) => r.clone(),
        None => default_resolutions(signal.len() - 1, settings.min_boxes),
    };
    let signal = normalize(signal, settings.normalization);
    let sets: Vec<CoarseExponents<T>> = resolutions
        .par_iter()
        .map(|&n| coarse_exponents(&signal, n))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|c| c.alphas.len() >= settings.min_boxes.max(1))
        .collect();
    if sets.is_empty() {
        return Err(Error::Analysis("no valid boxes".into()));
    }
    let step = T::lit(settings.grid_step);
    let bandwidths: Vec<T> = sets
        .iter()
        .map(|c| match settings.bandwidth {
            Some(h) => T::lit(h),
            None => {
                let rule = T::lit(1.06)
                    * std_dev(&c.alphas)
                    * T::of_usize(c.alphas.len()).powf(T::lit(-0.2));
                rule.max(step)
            }
        })
        .collect();
    let grid: Vec<T> = match &settings.alpha_grid {
        Some(g) => g.iter().map(|&a| T::lit(a)).collect(),
        None => {
            let widest = bandwidths.iter().copied().fold(T::zero(), T::max);
            auto_grid(&sets, T::lit(4.0) * widest, step)
        }
    };
    let curves = sets
        .par_iter()
        .zip(bandwidths.par_iter())
        .map(|(c, &h)| kde_curve(c, h, &grid))
        .collect();
    Spectrum::from_curves(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: Vec<(f64, f64)>) -> SpectrumCurve<f64> {
        SpectrumCurve {
            box_size: 8,
            delta: 0.1,
            bandwidth: 0.01,
            boxes: 1,
            dropped: 0,
            points,
        }
    }

    #[test]
    fn peak_examples() {
        let s = Spectrum::from_curves(vec![curve(vec![(0.5, 1.0)])]).unwrap();
        assert_eq!((s.peak_alpha, s.peak_f), (0.5, 1.0));
        let parabola: Vec<_> = (0..11)
            .map(|k| {
                let a = k as f64 * 0.1;
                (a, 1.0 - (k as f64 - 6.0).powi(2))
            })
            .collect();
        let s = Spectrum::from_curves(vec![curve(parabola)]).unwrap();
        assert_eq!(s.peak_f, 1.0);
        assert!((s.peak_alpha - 0.6).abs() < 1e-12);
        let tie = vec![(0.3, 0.5), (0.4, 0.9), (0.7, 0.9)];
        let s = Spectrum::from_curves(vec![curve(tie)]).unwrap();
        assert_eq!(s.peak_alpha, 0.4);
        assert!(Spectrum::<f64>::from_curves(vec![curve(vec![])]).is_err());
        assert!(Spectrum::<f64>::from_curves(vec![]).is_err());
    }

    #[test]
    fn resolutions_for_reference_length() {
        assert_eq!(default_resolutions(20_000, 50), vec![32, 64, 128, 256]);
        assert_eq!(default_resolutions(1024, 50), vec![2, 4, 8, 16]);
        assert_eq!(default_resolutions(120, 50), vec![2]);
        assert!(default_resolutions(60, 50).is_empty());
    }

    #[test]
    fn ramp_peaks_at_one() {
        let n = 20_000;
        let ramp: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        let s = large_deviation_spectrum(&ramp, &SpectrumSettings::default()).unwrap();
        assert!((s.peak_alpha - 1.0).abs() <= 0.005);
        assert_eq!(s.peak_box_size, 32);
    }

    #[test]
    fn constant_signal_has_no_valid_boxes() {
        let err = large_deviation_spectrum(&vec![1.0f64; 5000], &SpectrumSettings::default())
            .unwrap_err();
        assert_eq!(err, Error::Analysis("no valid boxes".into()));
    }
}
