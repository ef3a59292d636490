//! Scalar abstractions.
//!
//! Everything numeric in this crate is written against [`Real`], which is
//! implemented for `f32` and `f64`. The chaotic maps in
//! [`crate::dynamics::maps`] only need field arithmetic plus `floor`, `abs`
//! and `powf`, so they are written against the weaker [`MapScalar`], which
//! is also implemented by the arbitrary-precision [`crate::precise::Precise`].

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Sub};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Hardware floating-point scalar (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Significand width in bits, including the implicit leading bit.
    const MANTISSA_DIGITS: u32;

    /// Converts an `f64` literal. Never fails for finite input.
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }

    /// Converts to `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Converts a count or index.
    fn of_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("representable count")
    }
}

impl Real for f32 {
    const MANTISSA_DIGITS: u32 = f32::MANTISSA_DIGITS;
}

impl Real for f64 {
    const MANTISSA_DIGITS: u32 = f64::MANTISSA_DIGITS;
}

/// Minimal arithmetic needed by the power-law and shift maps.
///
/// Operations consume their operands; implementors that are expensive to
/// copy are expected to be cloned at the call site.
pub trait MapScalar:
    Clone
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn floor(&self) -> Self;
    fn abs(&self) -> Self;
    fn powf(&self, exponent: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl<T: Real> MapScalar for T {
    fn from_f64(v: f64) -> Self {
        T::lit(v)
    }

    fn to_f64(&self) -> f64 {
        self.as_f64()
    }

    fn floor(&self) -> Self {
        Float::floor(*self)
    }

    fn abs(&self) -> Self {
        Float::abs(*self)
    }

    fn powf(&self, exponent: &Self) -> Self {
        Float::powf(*self, *exponent)
    }

    fn is_finite(&self) -> bool {
        Float::is_finite(*self)
    }
}
