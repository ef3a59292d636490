//! The power-law map for `K`, its conjugate coupled shift map for `I`, and
//! the change of variables between them.
//!
//! These functions are generic over [`MapScalar`] so they can be evaluated
//! in arbitrary precision (see [`crate::precise`]).

use num_traits::{Num, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::MapScalar;

/// Coefficients of the coupled map: coupling `epsilon`, scale `u`, exponent `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapParams<S> {
    pub epsilon: S,
    pub u: S,
    pub d: S,
}

/// One step of the coupled shift map,
/// `(1 - epsilon) (2 i mod 1) + epsilon |r|`.
///
/// Expects `i_prev >= 0`.
pub fn shift_step<S: MapScalar>(i_prev: S, r_prev: S, epsilon: S) -> S {
    let doubled = i_prev.clone() + i_prev;
    let folded = doubled.clone() - doubled.floor();
    couple(folded, r_prev, epsilon)
}

/// Blends the folded doubling-map value with the previous return.
pub(crate) fn couple<S: MapScalar>(folded: S, r_prev: S, epsilon: S) -> S {
    (S::from_f64(1.0) - epsilon.clone()) * folded + epsilon * r_prev.abs()
}

/// `K = (1 + i/u)^(1-D)`.
pub fn k_from_i<S: MapScalar>(i: S, u: S, d: S) -> S {
    let one = S::from_f64(1.0);
    (one.clone() + i / u).powf(&(one - d))
}

/// Inverse of [`k_from_i`]: `u (k^(1/(1-D)) - 1)`.
pub fn i_from_k<S: MapScalar>(k: S, u: S, d: S) -> Result<S> {
    if !(k > S::from_f64(0.0)) {
        return Err(Error::domain("K", k.to_f64(), "must be positive"));
    }
    let one = S::from_f64(1.0);
    let inv = one.clone() / (one.clone() - d);
    Ok(u * (k.powf(&inv) - one))
}

/// The power-law map written directly in `K`: pull back to `I`, take one
/// coupled shift step, push forward again.
pub fn kinetic_map_direct<S: MapScalar>(k_prev: S, r_prev: S, p: &MapParams<S>) -> Result<S> {
    let i = i_from_k(k_prev, p.u.clone(), p.d.clone())?;
    let next = shift_step(i, r_prev, p.epsilon.clone());
    Ok(k_from_i(next, p.u.clone(), p.d.clone()))
}

/// Log-log slope `D/(1-D)` of the stationary density of `K` at zero coupling.
///
/// Generic over any numeric field so it can be evaluated exactly on
/// rationals.
pub fn invariant_density_exponent<N>(d: N) -> Result<N>
where
    N: Num + Clone + ToPrimitive,
{
    let denom = N::one() - d.clone();
    if denom.is_zero() {
        return Err(Error::domain(
            "D",
            d.to_f64().unwrap_or(f64::NAN),
            "must differ from 1",
        ));
    }
    Ok(d / denom)
}

/// Intrinsic time of a round, `tau_B = 2K`.
pub fn intrinsic_time<S: MapScalar>(k: S) -> Result<S> {
    if !(k > S::from_f64(0.0)) {
        return Err(Error::domain("K", k.to_f64(), "must be positive"));
    }
    Ok(k.clone() + k)
}
