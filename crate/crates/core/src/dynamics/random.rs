//! Deterministic randomness for the round engine.
//!
//! One ChaCha8 stream (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`) drives
//! a whole simulation. Per round it is consumed in a fixed order: one `u64`
//! for the doubling-map refill, then standard normals from the Marsaglia
//! polar method, which draws pairs and caches the second variate.
//! Uniforms take the top `MANTISSA_DIGITS` bits of a `u64`.

use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::scalar::Real;

/// Random source for one simulation.
#[derive(Debug, Clone)]
pub struct RoundRng<T> {
    rng: ChaCha8Rng,
    spare: Option<T>,
}

impl<T: Real> RoundRng<T> {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with full significand resolution.
    pub fn uniform(&mut self) -> T {
        let bits = T::MANTISSA_DIGITS;
        let m = self.rng.next_u64() >> (64 - bits);
        T::from(m).expect("fits in significand") * T::lit(2.0).powi(-(bits as i32))
    }

    /// Standard normal variate.
    pub fn gaussian(&mut self) -> T {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let one = T::one();
        let two = T::lit(2.0);
        loop {
            let u = two * self.uniform() - one;
            let v = two * self.uniform() - one;
            let s = u * u + v * v;
            if s >= one || s == T::zero() {
                continue;
            }
            let factor = (-two * s.ln() / s).sqrt();
            self.spare = Some(v * factor);
            return u * factor;
        }
    }
}

/// `2 i mod 1` for a driver whose binary expansion continues past the
/// significand with uniformly random digits.
///
/// Doubling shifts one known bit out of the top of the fraction; the result
/// is topped back up to a full significand with fresh low-order bits taken
/// from the high end of `bits`. This is the exact doubling map applied to a
/// real number whose unrepresented digits are revealed lazily, so orbits do
/// not collapse onto the dyadic fixed point `0` as plain floating-point
/// doubling does within one significand's worth of steps. Zero is treated as
/// exact and stays fixed.
pub fn double_mod1_refilled<T: Real>(i: T, bits: u64) -> T {
    if i == T::zero() {
        return i;
    }
    let p = T::MANTISSA_DIGITS;
    let (mant, exp, _) = Float::integer_decode(i);
    let exp = i32::from(exp) + 1;
    if exp >= 0 {
        // Integer-valued input: every fractional digit is unknown.
        let m = bits >> (64 - p);
        return T::from(m).expect("fits in significand") * T::lit(2.0).powi(-(p as i32));
    }
    let shift = (-exp) as u32;
    let frac = if shift >= 64 {
        mant
    } else {
        mant & ((1u64 << shift) - 1)
    };
    let used = 64 - frac.leading_zeros();
    let fill = p.saturating_sub(used);
    let m = if fill == 0 {
        frac
    } else {
        (frac << fill) | (bits >> (64 - fill))
    };
    let two = T::lit(2.0);
    T::from(m).expect("fits in significand") * two.powi(-(fill as i32)) * two.powi(exp)
}
