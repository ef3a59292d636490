//! Arbitrary-precision scalar for the chaotic maps.
//!
//! The doubling map loses one bit per step, so comparing two 1000-step
//! orbits of conjugate maps needs well over 1000 bits of working precision.
//! [`Precise`] wraps an `astro-float` number at a compile-time precision and
//! implements [`MapScalar`], so the same map code runs on it unchanged.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::scalar::MapScalar;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

/// Binary floating-point number with `BITS` bits of significand.
#[derive(Clone)]
pub struct Precise<const BITS: usize>(BigFloat);

impl<const BITS: usize> Precise<BITS> {
    pub fn new(v: f64) -> Self {
        Self(BigFloat::from_f64(v, BITS))
    }

    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    /// Uniform on `[0, 1)` with every one of the `BITS` significand bits
    /// random, built from the high halves of successive `next_u64` draws.
    ///
    /// A starting point taken from an `f64` is dyadic with at most 53 bits,
    /// so its doubling orbit hits `0` after 53 steps; this one does not.
    pub fn random_unit(mut next_u64: impl FnMut() -> u64) -> Self {
        let chunk = Self::new(2f64.powi(-32));
        let mut scale = chunk.clone();
        let mut acc = Self::new(0.0);
        for _ in 0..BITS.div_ceil(32) {
            let word = Self::new((next_u64() >> 32) as f64);
            acc = acc + word * scale.clone();
            scale = scale * chunk.clone();
        }
        acc
    }
}

impl<const BITS: usize> fmt::Debug for Precise<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Precise<{BITS}>({:e})", self.to_f64())
    }
}

impl<const BITS: usize> PartialEq for Precise<BITS> {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl<const BITS: usize> PartialOrd for Precise<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl<const BITS: usize> Add for Precise<BITS> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0.add(&rhs.0, BITS, RM))
    }
}

impl<const BITS: usize> Sub for Precise<BITS> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0.sub(&rhs.0, BITS, RM))
    }
}

impl<const BITS: usize> Mul for Precise<BITS> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0.mul(&rhs.0, BITS, RM))
    }
}

impl<const BITS: usize> Div for Precise<BITS> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self(self.0.div(&rhs.0, BITS, RM))
    }
}

impl<const BITS: usize> MapScalar for Precise<BITS> {
    fn from_f64(v: f64) -> Self {
        Self::new(v)
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        // Round to 64 bits first so formatting stays short; the decimal
        // string carries enough digits for a faithful f64.
        let mut short = self.0.clone();
        if short.set_precision(64, RM).is_err() {
            return f64::NAN;
        }
        CONSTS.with(|cc| {
            short
                .format(Radix::Dec, RM, &mut cc.borrow_mut())
                .ok()
                .and_then(|s| s.parse::<f64>().ok())
                .unwrap_or(f64::NAN)
        })
    }

    fn floor(&self) -> Self {
        Self(self.0.floor())
    }

    fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    fn powf(&self, exponent: &Self) -> Self {
        CONSTS.with(|cc| Self(self.0.pow(&exponent.0, BITS, RM, &mut cc.borrow_mut())))
    }

    fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }
}
