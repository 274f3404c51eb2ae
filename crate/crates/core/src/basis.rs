//! Orthonormal cosine basis on `[0, tau]` and finite cosine series.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// The orthonormal cosine system on `[0, tau]`:
/// `phi_0 = sqrt(1/tau)`, `phi_l(t) = sqrt(2/tau) cos(pi l t / tau)` for l >= 1.
#[derive(Debug, Clone, Copy)]
pub struct CosineBasis {
    tau: f64,
}

impl CosineBasis {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain(format!(
                "period must be positive and finite, got {tau}"
            )));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Value of `phi_l` at `t` in `[0, tau]`.
    pub fn eval(&self, l: usize, t: f64) -> Result<f64> {
        check_time(t, self.tau)?;
        Ok(self.eval_unchecked(l, t))
    }

    pub(crate) fn eval_unchecked(&self, l: usize, t: f64) -> f64 {
        if l == 0 {
            (1.0 / self.tau).sqrt()
        } else {
            (2.0 / self.tau).sqrt() * (PI * l as f64 * t / self.tau).cos()
        }
    }

    /// Antiderivative-based `int_a^b phi_l dt`.
    pub fn integral(&self, l: usize, a: f64, b: f64) -> f64 {
        if l == 0 {
            (b - a) / self.tau.sqrt()
        } else {
            let w = PI * l as f64 / self.tau;
            (2.0 / self.tau).sqrt() * ((w * b).sin() - (w * a).sin()) / w
        }
    }
}

pub(crate) fn check_time(t: f64, tau: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 || t > tau {
        return Err(Error::Domain(format!(
            "time {t} is outside the observation period [0, {tau}]"
        )));
    }
    Ok(())
}

/// Value of `phi_l(t)`; domain-checked.
pub fn basis_eval(l: usize, t: f64, tau: f64) -> Result<f64> {
    CosineBasis::new(tau)?.eval(l, t)
}

/// Evaluate a finite cosine series `sum_l theta_l phi_l(t)`.
pub fn series_eval(theta: &[f64], t: f64, tau: f64) -> Result<f64> {
    let basis = CosineBasis::new(tau)?;
    check_time(t, tau)?;
    Ok(series_eval_unchecked(theta, t, &basis))
}

pub(crate) fn series_eval_unchecked(theta: &[f64], t: f64, basis: &CosineBasis) -> f64 {
    theta
        .iter()
        .enumerate()
        .map(|(l, &c)| c * basis.eval_unchecked(l, t))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{simpson, DEFAULT_PANELS};
    use approx::assert_relative_eq;

    #[test]
    fn basis_values() {
        assert_relative_eq!(basis_eval(0, 0.3, 1.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            basis_eval(1, 0.0, 1.0).unwrap(),
            2.0f64.sqrt(),
            max_relative = 1e-15
        );
        // cos(pi/2) in floats is ~6e-17, not exactly zero
        assert!(basis_eval(2, 0.25, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn basis_rejects_out_of_range_times() {
        assert!(basis_eval(1, -0.1, 1.0).is_err());
        assert!(basis_eval(1, 1.1, 1.0).is_err());
        assert!(basis_eval(1, f64::NAN, 1.0).is_err());
        assert!(CosineBasis::new(0.0).is_err());
        assert!(CosineBasis::new(-1.0).is_err());
    }

    #[test]
    fn orthonormality_by_quadrature() {
        let tau = 1.7;
        let basis = CosineBasis::new(tau).unwrap();
        for k in 0..=20usize {
            for l in k..=20usize {
                let v = simpson(
                    |t| basis.eval_unchecked(k, t) * basis.eval_unchecked(l, t),
                    0.0,
                    tau,
                    DEFAULT_PANELS,
                );
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!(
                    (v - expect).abs() < 1e-10,
                    "orthonormality failed for ({k},{l}): {v}"
                );
            }
        }
    }

    #[test]
    fn series_eval_constant() {
        // theta = (c sqrt(tau), 0, ...) is the constant c
        let tau = 2.0f64;
        let c = 3.25;
        let theta = [c * tau.sqrt(), 0.0, 0.0];
        for t in [0.0, 0.7, 2.0] {
            assert_relative_eq!(series_eval(&theta, t, tau).unwrap(), c, max_relative = 1e-14);
        }
    }

    #[test]
    fn series_eval_raised_cosine_boundaries() {
        // theta_0 = (S/2) sqrt(tau), theta_1 = -(S/2) sqrt(tau/2) is (S/2)(1 - cos(pi t/tau))
        let s = 5.0f64;
        let tau = 1.0f64;
        let theta = [(s / 2.0) * tau.sqrt(), -(s / 2.0) * (tau / 2.0).sqrt()];
        assert!(series_eval(&theta, 0.0, tau).unwrap().abs() < 1e-12);
        assert_relative_eq!(series_eval(&theta, tau, tau).unwrap(), s, max_relative = 1e-14);
    }

    #[test]
    fn integral_matches_quadrature() {
        let basis = CosineBasis::new(1.3).unwrap();
        for l in 0..6usize {
            let (a, b) = (0.21, 1.07);
            let direct = basis.integral(l, a, b);
            let quad = simpson(|t| basis.eval_unchecked(l, t), a, b, 1 << 10);
            assert_relative_eq!(direct, quad, max_relative = 1e-10, epsilon = 1e-12);
        }
    }
}
