//! Per-round harmonic-oscillator restriction and its risk-minimizing strategy.
//!
//! Each round the company minimizes the expected squared fitness
//! `<x^2>` over the eigenstates of
//! `H = -hbar_s^2/(2m) d^2/dx^2 + (b/2) x^2`. The spectrum is discrete and
//! `<x^2>_n = (n + 1/2)/alpha^2` grows with `n`, so the minimizer is always
//! the ground state, a Gaussian with standard deviation `theta`.
//!
//! A round is fully determined by `(hbar_s, b, tau_b)`:
//!
//! ```text
//! omega = 2 b tau_b / hbar_s        mass  = hbar_s^2 / (4 b tau_b^2)
//! alpha = (mass b / hbar_s^2)^(1/4) theta = 1 / (sqrt(2) alpha) = sqrt(tau_b)
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest quantum number accepted by [`RoundOscillator::eigenfunction`].
pub const MAX_QUANTUM_NUMBER: u32 = 170;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundOscillator<T> {
    pub hbar_s: T,
    pub b: T,
    pub omega: T,
    pub mass: T,
    pub alpha: T,
    pub theta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel<T> {
    pub n: u32,
    pub energy: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumStrategy<T> {
    pub level: EnergyLevel<T>,
    pub theta: T,
    pub min_risk: T,
}

/// Composite Simpson grid for [`RoundOscillator::numeric_moment`].
///
/// The integration range is `[-L, L]` with `L = 10 theta sqrt(2n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: usize,
    /// Largest accepted Richardson estimate of the discretization error.
    pub tolerance: f64,
}

impl QuadratureGrid {
    pub const MIN_NODES: usize = 10_000;
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self {
            nodes: 20_001,
            tolerance: 1e-9,
        }
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<T> {
    if v > T::zero() && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(name, v.as_f64(), "must be positive and finite"))
    }
}

impl<T: Real> RoundOscillator<T> {
    /// Builds the round restriction whose intrinsic time is `tau_b`.
    pub fn derive(hbar_s: T, b: T, tau_b: T) -> Result<Self> {
        let hbar_s = positive("hbar_s", hbar_s)?;
        let b = positive("b", b)?;
        let tau_b = positive("tau_B", tau_b)?;
        let two = T::lit(2.0);
        let omega = two * b * tau_b / hbar_s;
        let mass = hbar_s * hbar_s / (T::lit(4.0) * b * tau_b * tau_b);
        let alpha = (mass * b / (hbar_s * hbar_s)).sqrt().sqrt();
        let theta = T::one() / (T::SQRT_2() * alpha);
        if !(omega.is_finite() && mass.is_finite() && alpha.is_finite() && mass > T::zero()) {
            return Err(Error::Numerical(format!(
                "oscillator for tau_B = {} is not representable",
                tau_b
            )));
        }
        Ok(Self {
            hbar_s,
            b,
            omega,
            mass,
            alpha,
            theta,
        })
    }

    /// Intrinsic time of the round, `theta^2 = hbar_s omega / (2 b)`.
    pub fn tau_b(&self) -> T {
        self.hbar_s * self.omega / (T::lit(2.0) * self.b)
    }

    pub fn energy_level(&self, n: u32) -> EnergyLevel<T> {
        EnergyLevel {
            n,
            energy: half_integer::<T>(n) * self.hbar_s * self.omega,
        }
    }

    /// `<x^2>` in the `n`-th eigenstate.
    pub fn expected_risk(&self, n: u32) -> T {
        half_integer::<T>(n) / (self.alpha * self.alpha)
    }

    /// Enumerates the ladder `0..=n_max` and returns the risk minimizer.
    pub fn equilibrium_strategy(&self, n_max: u32) -> Result<EquilibriumStrategy<T>> {
        if n_max < 1 {
            return Err(Error::domain("n_max", n_max as f64, "must be at least 1"));
        }
        let mut best = 0;
        let mut best_risk = self.expected_risk(0);
        for n in 1..=n_max {
            let risk = self.expected_risk(n);
            if risk < best_risk {
                best = n;
                best_risk = risk;
            }
        }
        Ok(EquilibriumStrategy {
            level: self.energy_level(best),
            theta: self.theta,
            min_risk: best_risk,
        })
    }

    /// Normalized eigenfunction `psi_n(x)`.
    ///
    /// Runs the three-term recurrence for Hermite functions with the Gaussian
    /// and normalization factors held in log space, rescaling the iterates
    /// when they grow, so neither `n!` nor `H_n` is ever formed.
    pub fn eigenfunction(&self, n: u32, x: T) -> Result<T> {
        if n > MAX_QUANTUM_NUMBER {
            return Err(Error::domain(
                "n",
                n as f64,
                "quantum number above 170 is not supported",
            ));
        }
        let y = self.alpha * x;
        let limit = T::max_value().sqrt();
        let mut prev = T::zero();
        let mut cur = T::one();
        let mut log_scale = T::zero();
        for k in 0..n {
            let kf = T::of_usize(k as usize);
            let next = (T::lit(2.0) / (kf + T::one())).sqrt() * y * cur
                - (kf / (kf + T::one())).sqrt() * prev;
            prev = cur;
            cur = next;
            if cur.abs() > limit {
                prev = prev / limit;
                cur = cur / limit;
                log_scale = log_scale + limit.ln();
            }
        }
        if cur == T::zero() {
            return Ok(T::zero());
        }
        let log_norm = T::lit(0.5) * self.alpha.ln() - T::lit(0.25) * T::PI().ln();
        let log_mag = cur.abs().ln() + log_scale + log_norm - y * y / T::lit(2.0);
        Ok(cur.signum() * log_mag.exp())
    }

    /// `|psi_0(x)|^2`, a centred normal density with standard deviation `theta`.
    pub fn ground_state_density(&self, x: T) -> T {
        normal_pdf(x, T::zero(), self.theta)
    }

    /// Density of the round's return: mean `mu dt`, variance `tau_b sigma^2`.
    pub fn returns_density(&self, mu: T, dt: T, sigma: T, r: T) -> Result<T> {
        let sigma = positive("sigma", sigma)?;
        let dt = positive("dt", dt)?;
        Ok(normal_pdf(r, mu * dt, self.theta * sigma))
    }

    /// `int |psi_n(x)|^2 x^power dx` by composite Simpson.
    pub fn numeric_moment(&self, n: u32, power: u32, grid: &QuadratureGrid) -> Result<T> {
        if power > 2 {
            return Err(Error::domain("power", power as f64, "must be 0, 1 or 2"));
        }
        if grid.nodes < QuadratureGrid::MIN_NODES {
            return Err(Error::domain(
                "nodes",
                grid.nodes as f64,
                "quadrature needs at least 10^4 nodes",
            ));
        }
        let half_width =
            T::lit(10.0) * self.theta * (T::lit(2.0) * T::of_usize(n as usize) + T::one()).sqrt();
        let integrand = |x: T| -> Result<T> {
            let psi = self.eigenfunction(n, x)?;
            Ok(psi * psi * x.powi(power as i32))
        };
        let intervals = (grid.nodes - 1) & !1;
        let fine = simpson(integrand, -half_width, half_width, intervals)?;
        let coarse = simpson(integrand, -half_width, half_width, (intervals / 2) & !1)?;
        let estimate = (fine - coarse).abs() / T::lit(15.0);
        let scale = fine.abs().max(T::one());
        if !fine.is_finite() || estimate > T::lit(grid.tolerance) * scale {
            return Err(Error::Numerical(format!(
                "quadrature with {} nodes has estimated error {} above tolerance {}",
                grid.nodes, estimate, grid.tolerance
            )));
        }
        Ok(fine)
    }
}

/// Physicists' Hermite polynomial `H_n(y)`.
pub fn hermite<T: Real>(n: u32, y: T) -> T {
    let two = T::lit(2.0);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two * y;
    for k in 1..n {
        let next = two * y * cur - two * T::of_usize(k as usize) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Clock-time random-walk density of returns: mean `mu dt`, variance `dt sigma^2`.
pub fn neoclassical_density<T: Real>(mu: T, dt: T, sigma: T, r: T) -> Result<T> {
    let sigma = positive("sigma", sigma)?;
    let dt = positive("dt", dt)?;
    Ok(normal_pdf(r, mu * dt, dt.sqrt() * sigma))
}

fn half_integer<T: Real>(n: u32) -> T {
    T::of_usize(n as usize) + T::lit(0.5)
}

fn normal_pdf<T: Real>(x: T, mean: T, sd: T) -> T {
    let z = (x - mean) / sd;
    (-(z * z) / T::lit(2.0)).exp() / (sd * (T::lit(2.0) * T::PI()).sqrt())
}

fn simpson<T: Real>(
    f: impl Fn(T) -> Result<T>,
    lo: T,
    hi: T,
    intervals: usize,
) -> Result<T> {
    let h = (hi - lo) / T::of_usize(intervals);
    let mut acc = f(lo)? + f(hi)?;
    for i in 1..intervals {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc = acc + w * f(lo + h * T::of_usize(i))?;
    }
    Ok(acc * h / T::lit(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn osc(tau: f64) -> RoundOscillator<f64> {
        RoundOscillator::derive(1.0, 1.0, tau).unwrap()
    }

    #[test]
    fn derive_examples() {
        let o = osc(1.0);
        assert_relative_eq!(o.omega, 2.0);
        assert_relative_eq!(o.mass, 0.25);
        assert_relative_eq!(o.theta, 1.0, epsilon = 1e-15);

        let o = osc(0.5);
        assert_relative_eq!(o.omega, 1.0);
        assert_relative_eq!(o.mass, 1.0);
        assert_relative_eq!(o.theta * o.theta, 0.5, epsilon = 1e-15);

        // mass = 1 / (4 * 2 * 0.25) = 0.5; theta^2 = tau_B independent of b.
        let o = RoundOscillator::derive(1.0, 2.0, 0.5).unwrap();
        assert_relative_eq!(o.omega, 2.0);
        assert_relative_eq!(o.mass, 0.5);
        assert_relative_eq!(o.theta * o.theta, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn derive_rejects_nonpositive() {
        for (h, b, t, name) in [
            (0.0, 1.0, 1.0, "hbar_s"),
            (1.0, -1.0, 1.0, "b"),
            (1.0, 1.0, 0.0, "tau_B"),
            (1.0, 1.0, f64::NAN, "tau_B"),
        ] {
            match RoundOscillator::derive(h, b, t) {
                Err(Error::Domain { name: got, .. }) => assert_eq!(got, name),
                other => panic!("expected domain error, got {other:?}"),
            }
        }
    }

    #[test]
    fn energy_examples() {
        assert_eq!(osc(1.0).energy_level(0).energy, 1.0);
        assert_eq!(osc(0.5).energy_level(1).energy, 1.5);
        // E0 = b tau_b = 2 b K when tau_b = 2K.
        let k = 0.37;
        let o = RoundOscillator::derive(1.0, 1.0, 2.0 * k).unwrap();
        assert_relative_eq!(o.energy_level(0).energy, 2.0 * k, epsilon = 1e-15);
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite(0, 3.7), 1.0);
        assert_eq!(hermite(2, 1.0), 2.0);
        assert_eq!(hermite(3, 1.0), -4.0);
        assert_eq!(hermite(4, 0.5), 16.0 * 0.0625 - 48.0 * 0.25 + 12.0);
    }

    #[test]
    fn eigenfunction_values() {
        // alpha = 1 at tau_b = 1/2.
        let o = osc(0.5);
        assert_relative_eq!(o.alpha, 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            o.eigenfunction(0, 0.0).unwrap(),
            std::f64::consts::PI.powf(-0.25),
            epsilon = 1e-15
        );
        assert_eq!(o.eigenfunction(1, 0.0).unwrap(), 0.0);
        assert!(o.eigenfunction(171, 0.0).is_err());
        assert!(o.eigenfunction(170, 3.0).unwrap().is_finite());
    }

    #[test]
    fn eigenfunction_matches_explicit_formula() {
        // Independent route: prefactor with n! and the polynomial directly.
        let o = RoundOscillator::derive(1.3, 0.7, 0.9).unwrap();
        let a = o.alpha;
        for n in 0..12u32 {
            let fact: f64 = (1..=n).map(f64::from).product();
            let pref = (a / (std::f64::consts::PI.sqrt() * 2f64.powi(n as i32) * fact)).sqrt();
            for &x in &[-2.1, -0.4, 0.0, 0.9, 1.7] {
                let direct = pref * (-(a * x).powi(2) / 2.0).exp() * hermite(n, a * x);
                assert_relative_eq!(
                    o.eigenfunction(n, x).unwrap(),
                    direct,
                    epsilon = 1e-12,
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn risk_examples() {
        let o = osc(0.5);
        assert_eq!(o.expected_risk(0), 0.5);
        assert_eq!(o.expected_risk(3), 3.5);
        let eq = o.equilibrium_strategy(5).unwrap();
        assert_eq!(eq.level.n, 0);
        assert_eq!(eq.min_risk, 0.5);
        assert!(o.equilibrium_strategy(0).is_err());
    }

    #[test]
    fn densities() {
        let o = osc(1.0);
        assert_relative_eq!(
            o.ground_state_density(0.0),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            o.returns_density(0.0, 1.0, 1.0, 0.0).unwrap(),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-15
        );
        assert!(o.returns_density(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(o.returns_density(0.0, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn moment_examples() {
        let o = osc(0.5);
        let g = QuadratureGrid::default();
        assert!((o.numeric_moment(0, 0, &g).unwrap() - 1.0).abs() < 1e-8);
        assert!(o.numeric_moment(0, 1, &g).unwrap().abs() < 1e-10);
        assert!((o.numeric_moment(2, 2, &g).unwrap() - 2.5).abs() < 1e-6);
        assert!(o.numeric_moment(0, 3, &g).is_err());
        let coarse = QuadratureGrid {
            nodes: 100,
            tolerance: 1e-9,
        };
        assert!(o.numeric_moment(0, 0, &coarse).is_err());
    }

    #[test]
    fn too_coarse_grid_is_a_numerical_failure() {
        let o = osc(0.5);
        let strict = QuadratureGrid {
            nodes: 10_001,
            tolerance: 1e-30,
        };
        assert!(matches!(
            o.numeric_moment(10, 2, &strict),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let o = RoundOscillator::<f32>::derive(1.0, 1.0, 0.5).unwrap();
        assert!((o.theta * o.theta - 0.5).abs() < 1e-6);
        assert_eq!(o.equilibrium_strategy(20).unwrap().level.n, 0);
    }
}
