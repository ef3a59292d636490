use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coarse Hölder exponents of one box size.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseExponents<T> {
    pub box_size: usize,
    /// Box scale `box_size / N`, with `N = len - 1` increments.
    pub delta: T,
    /// Exponents of boxes with nonzero oscillation, in signal order.
    pub alphas: Vec<T>,
    /// Boxes with zero oscillation.
    pub dropped: usize,
}

impl<T> CoarseExponents<T> {
    pub fn boxes(&self) -> usize {
        self.alphas.len() + self.dropped
    }
}

/// Oscillation exponents `ln(max - min) / ln(delta)` over consecutive boxes.
///
/// A signal of `len` samples has `N = len - 1` increments. Box `j` is the
/// closed window of samples `j n ..= (j + 1) n`, so adjacent boxes share an
/// endpoint and every box spans exactly `n` increments; trailing samples
/// that do not fill a box are ignored. With this convention a linear ramp
/// has exponent exactly 1.
pub fn coarse_exponents<T: Real>(signal: &[T], box_size: usize) -> Result<CoarseExponents<T>> {
    if box_size < 2 {
        return Err(Error::domain("box_size", box_size as f64, "must be at least 2"));
    }
    if signal.len() < 2 * box_size {
        return Err(Error::domain(
            "box_size",
            box_size as f64,
            "must be at most half the signal length",
        ));
    }
    if let Some(idx) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!(
            "signal value at index {idx} is not finite: {}",
            signal[idx]
        )));
    }
    let n_incr = signal.len() - 1;
    let boxes = n_incr / box_size;
    let delta = T::of_usize(box_size) / T::of_usize(n_incr);
    let log_delta = delta.ln();
    let per_box: Vec<Option<T>> = (0..boxes)
        .into_par_iter()
        .map(|j| {
            let window = &signal[j * box_size..=(j + 1) * box_size];
            let (lo, hi) = window
                .iter()
                .fold((window[0], window[0]), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let osc = hi - lo;
            (osc > T::zero()).then(|| osc.ln() / log_delta)
        })
        .collect();
    let alphas: Vec<T> = per_box.iter().flatten().copied().collect();
    Ok(CoarseExponents {
        box_size,
        delta,
        dropped: boxes - alphas.len(),
        alphas,
    })
}
