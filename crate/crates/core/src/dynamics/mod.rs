//! Chaotic volatility driver and the round engine.
//!
//! The fundamental driver `I` follows a coupled doubling map, the kinetic
//! volatility component is `K = (1 + I/u)^(1-D)`, the round's intrinsic
//! time is `tau_B = 2K`, and the return is drawn from the ground state of
//! the oscillator built from `tau_B`.

mod engine;
mod io;
pub mod maps;
mod random;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use engine::{sample_return, simulate, step_round, Trajectory, TrajectoryMeta, ENGINE_VERSION};
pub use io::TRAJECTORY_HEADER;
pub use maps::{
    i_from_k, intrinsic_time, invariant_density_exponent, k_from_i, kinetic_map_direct,
    shift_step, MapParams,
};
pub use random::{double_mod1_refilled, RoundRng};

/// Starting value of the fundamental driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialDriver<T> {
    /// Uniform on `[0, 1)`, drawn from the simulation's generator.
    Random,
    Fixed(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams<T> {
    pub epsilon: T,
    pub u: T,
    pub d: T,
    pub mu: T,
    pub dt: T,
    pub sigma: T,
    pub b: T,
    pub hbar_s: T,
    pub s0: T,
    pub seed: u64,
    pub rounds: usize,
    pub transient: usize,
    pub i0: InitialDriver<T>,
    pub r_init: T,
}

impl<T: Real> GameParams<T> {
    /// Model constants used for the published simulation: epsilon = 0.001,
    /// u = 1e-5, D = 1.83, mu = 1e-6, dt = 1, sigma = 0.02, 30 000 rounds of
    /// which the first 10 000 are discarded.
    pub fn reference() -> Self {
        Self {
            epsilon: T::lit(0.001),
            u: T::lit(1e-5),
            d: T::lit(1.83),
            mu: T::lit(1e-6),
            dt: T::one(),
            sigma: T::lit(0.02),
            b: T::one(),
            hbar_s: T::one(),
            s0: T::one(),
            seed: 42,
            rounds: 30_000,
            transient: 10_000,
            i0: InitialDriver::Random,
            r_init: T::zero(),
        }
    }

    /// Checks every invariant, naming the first offending key.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("epsilon", self.epsilon),
            ("u", self.u),
            ("D", self.d),
            ("mu", self.mu),
            ("dt", self.dt),
            ("sigma", self.sigma),
            ("b", self.b),
            ("hbar_s", self.hbar_s),
            ("s0", self.s0),
            ("r_init", self.r_init),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::domain(name, v.as_f64(), "must be finite"));
            }
        }
        let zero = T::zero();
        let one = T::one();
        if self.epsilon < zero || self.epsilon > one {
            return Err(Error::domain("epsilon", self.epsilon.as_f64(), "must lie in [0, 1]"));
        }
        if self.u <= zero || self.u >= one {
            return Err(Error::domain("u", self.u.as_f64(), "must lie in (0, 1)"));
        }
        if self.d == one {
            return Err(Error::domain("D", self.d.as_f64(), "must differ from 1"));
        }
        for (name, v) in [
            ("dt", self.dt),
            ("sigma", self.sigma),
            ("b", self.b),
            ("hbar_s", self.hbar_s),
            ("s0", self.s0),
        ] {
            if v <= zero {
                return Err(Error::domain(name, v.as_f64(), "must be positive"));
            }
        }
        if self.rounds == 0 {
            return Err(Error::domain("rounds", 0.0, "must be positive"));
        }
        if self.transient >= self.rounds {
            return Err(Error::domain(
                "transient",
                self.transient as f64,
                "must be smaller than rounds",
            ));
        }
        if let InitialDriver::Fixed(i0) = self.i0 {
            if !(i0 >= zero && i0 < one) {
                return Err(Error::domain("i0", i0.as_f64(), "must lie in [0, 1)"));
            }
        }
        Ok(())
    }

    pub fn map_params(&self) -> MapParams<T> {
        MapParams {
            epsilon: self.epsilon,
            u: self.u,
            d: self.d,
        }
    }

    /// Same parameters in double precision, for reporting.
    pub fn to_record(&self) -> ParamsRecord {
        ParamsRecord {
            epsilon: self.epsilon.as_f64(),
            u: self.u.as_f64(),
            d: self.d.as_f64(),
            mu: self.mu.as_f64(),
            dt: self.dt.as_f64(),
            sigma: self.sigma.as_f64(),
            b: self.b.as_f64(),
            hbar_s: self.hbar_s.as_f64(),
            s0: self.s0.as_f64(),
            seed: self.seed,
            rounds: self.rounds,
            transient: self.transient,
            i0: match self.i0 {
                InitialDriver::Random => InitialDriver::Random,
                InitialDriver::Fixed(v) => InitialDriver::Fixed(v.as_f64()),
            },
            r_init: self.r_init.as_f64(),
        }
    }
}

/// Serializable view of [`GameParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub epsilon: f64,
    pub u: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub mu: f64,
    pub dt: f64,
    pub sigma: f64,
    pub b: f64,
    pub hbar_s: f64,
    pub s0: f64,
    pub seed: u64,
    pub rounds: usize,
    pub transient: usize,
    pub i0: InitialDriver<f64>,
    pub r_init: f64,
}

/// Complete state of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundState<T> {
    /// 1-based round index; round `k` ends at clock time `k dt`.
    pub round: usize,
    pub t: T,
    pub i: T,
    pub k: T,
    pub tau_b: T,
    pub omega: T,
    pub mass: T,
    pub x: T,
    pub r: T,
    pub s: T,
}
