use serde::{Deserialize, Serialize};

use super::maps::{couple, intrinsic_time, k_from_i};
use super::random::{double_mod1_refilled, RoundRng};
use super::{GameParams, InitialDriver, ParamsRecord, RoundState};
use crate::error::{Error, Result};
use crate::oscillator::RoundOscillator;
use crate::scalar::Real;

/// Version string written into trajectory metadata.
pub const ENGINE_VERSION: &str = concat!("qgame-engine/", env!("CARGO_PKG_VERSION"));

/// Relative slack allowed between `theta^2` and `tau_B` after the
/// oscillator round trip.
const THETA_ULPS: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub seed: u64,
    pub engine_version: String,
    pub rounds: usize,
    pub transient: usize,
    pub states: usize,
    /// Value of the driver before the first round.
    pub i0: f64,
    pub params: ParamsRecord,
}

/// Post-transient states of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub params: GameParams<T>,
    pub states: Vec<RoundState<T>>,
    pub meta: TrajectoryMeta,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn series(&self, f: impl Fn(&RoundState<T>) -> T) -> Vec<T> {
        self.states.iter().map(f).collect()
    }

    pub fn drivers(&self) -> Vec<T> {
        self.series(|s| s.i)
    }

    pub fn kinetic(&self) -> Vec<T> {
        self.series(|s| s.k)
    }

    pub fn intrinsic_times(&self) -> Vec<T> {
        self.series(|s| s.tau_b)
    }

    pub fn fitness(&self) -> Vec<T> {
        self.series(|s| s.x)
    }

    pub fn returns(&self) -> Vec<T> {
        self.series(|s| s.r)
    }

    pub fn prices(&self) -> Vec<T> {
        self.series(|s| s.s)
    }
}

/// Draws the round's fitness from the ground state with `theta^2 = 2k` and
/// converts it to a return `mu dt + sigma x`.
pub fn sample_return<T: Real>(k: T, p: &GameParams<T>, rng: &mut RoundRng<T>) -> (T, T) {
    let x = (k + k).sqrt() * rng.gaussian();
    (x, p.mu * p.dt + p.sigma * x)
}

fn finite<T: Real>(round: usize, name: &str, v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Round {
            round,
            detail: format!("{name} = {v}"),
        })
    }
}

/// Advances the game by one round.
///
/// The driver is folded with [`double_mod1_refilled`], consuming one `u64`
/// from `rng`, and then coupled to `|prev.r|`. Everything else in the round
/// is derived from the new driver.
pub fn step_round<T: Real>(
    prev: &RoundState<T>,
    p: &GameParams<T>,
    rng: &mut RoundRng<T>,
) -> Result<RoundState<T>> {
    let round = prev.round + 1;
    let folded = double_mod1_refilled(prev.i, rng.next_u64());
    let i = finite(round, "I", couple(folded, prev.r, p.epsilon))?;
    let k = finite(round, "K", k_from_i(i, p.u, p.d))?;
    let tau_b = intrinsic_time(k).map_err(|e| Error::Round {
        round,
        detail: e.to_string(),
    })?;
    let osc = RoundOscillator::derive(p.hbar_s, p.b, tau_b).map_err(|e| Error::Round {
        round,
        detail: e.to_string(),
    })?;
    let eq = osc.equilibrium_strategy(1).map_err(|e| Error::Round {
        round,
        detail: e.to_string(),
    })?;
    let theta_sq = eq.theta * eq.theta;
    let slack = T::lit(THETA_ULPS) * T::epsilon() * tau_b;
    if eq.level.n != 0 || (theta_sq - tau_b).abs() > slack {
        return Err(Error::Round {
            round,
            detail: format!(
                "equilibrium check failed: n = {}, theta^2 = {theta_sq}, tau_B = {tau_b}",
                eq.level.n
            ),
        });
    }
    let (x, r) = sample_return(k, p, rng);
    let x = finite(round, "x", x)?;
    let r = finite(round, "r", r)?;
    let s = finite(round, "S", prev.s * r.exp())?;
    if s <= T::zero() {
        return Err(Error::Round {
            round,
            detail: format!("S = {s} is not positive"),
        });
    }
    Ok(RoundState {
        round,
        t: T::of_usize(round) * p.dt,
        i,
        k,
        tau_b,
        omega: osc.omega,
        mass: osc.mass,
        x,
        r,
        s,
    })
}

/// Runs `p.rounds` rounds and keeps those after the transient.
///
/// A random initial driver is the first uniform drawn from the generator.
pub fn simulate<T: Real>(p: &GameParams<T>) -> Result<Trajectory<T>> {
    p.validate()?;
    let mut rng = RoundRng::seed_from_u64(p.seed);
    let i0 = match p.i0 {
        InitialDriver::Random => rng.uniform(),
        InitialDriver::Fixed(v) => v,
    };
    let k0 = k_from_i(i0, p.u, p.d);
    let mut state = RoundState {
        round: 0,
        t: T::zero(),
        i: i0,
        k: k0,
        tau_b: k0 + k0,
        omega: T::zero(),
        mass: T::zero(),
        x: T::zero(),
        r: p.r_init,
        s: p.s0,
    };
    let mut states = Vec::with_capacity(p.rounds - p.transient);
    for _ in 0..p.rounds {
        state = step_round(&state, p, &mut rng)?;
        if state.round > p.transient {
            states.push(state);
        }
    }
    let meta = TrajectoryMeta {
        seed: p.seed,
        engine_version: ENGINE_VERSION.to_string(),
        rounds: p.rounds,
        transient: p.transient,
        states: states.len(),
        i0: i0.as_f64(),
        params: p.to_record(),
    };
    Ok(Trajectory {
        params: *p,
        states,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(rounds: usize, transient: usize) -> GameParams<f64> {
        GameParams {
            rounds,
            transient,
            ..GameParams::reference()
        }
    }

    #[test]
    fn fixed_point_round() {
        let p = GameParams {
            epsilon: 0.0,
            ..short(10, 0)
        };
        let prev = RoundState {
            round: 3,
            t: 3.0,
            i: 0.0,
            k: 1.0,
            tau_b: 2.0,
            omega: 0.0,
            mass: 0.0,
            x: 0.0,
            r: 0.37,
            s: 1.5,
        };
        let mut rng = RoundRng::seed_from_u64(5);
        let next = step_round(&prev, &p, &mut rng).unwrap();
        assert_eq!(next.i, 0.0);
        assert_eq!(next.k, 1.0);
        assert_eq!(next.tau_b, 2.0);
        assert_eq!(next.round, 4);
        assert_eq!(next.s, prev.s * next.r.exp());
    }

    #[test]
    fn lengths() {
        assert_eq!(simulate(&short(30, 10)).unwrap().len(), 20);
        let one = simulate(&short(11, 10)).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.states[0].round, 11);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(simulate(&short(10, 10)).is_err());
        let p = GameParams {
            sigma: 0.0,
            ..short(10, 0)
        };
        assert!(matches!(simulate(&p), Err(Error::Domain { name: "sigma", .. })));
    }

    #[test]
    fn overflow_reports_round() {
        // A huge drift makes the price overflow after a few rounds.
        let p = GameParams {
            mu: 300.0,
            ..short(10, 0)
        };
        match simulate(&p) {
            Err(Error::Round { round, .. }) => assert_eq!(round, 3),
            other => panic!("expected round failure, got {other:?}"),
        }
    }
}
