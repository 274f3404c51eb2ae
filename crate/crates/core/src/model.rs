//! Ground-truth mean/intensity models as finite cosine series, with
//! smoothness-class membership checking.
//!
//! A model stores the cosine coefficients `theta` of the mean function
//! `Lambda(t) = sum_l theta_l phi_l(t)` on one period `[0, tau]`. The
//! intensity `lambda = Lambda'` is then a finite sine polynomial, so Fourier
//! coefficients, the Sobolev functional and the per-coefficient variances
//! downstream are all available in closed form.

use crate::basis::{check_time, series_eval_unchecked, CosineBasis};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, fmt_g17, simpson, DEFAULT_PANELS};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// Relative tolerance used for the boundary conditions `Lambda(0) = 0` and
/// `Lambda(tau) = S`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Mean function of a periodic Poisson process as a finite cosine series.
#[derive(Debug, Clone)]
pub struct IntensityModel {
    basis: CosineBasis,
    theta: Vec<f64>,
    /// Sine coefficients of the intensity: `lambda(t) = sum_k b_k sin(pi k t / tau)`.
    sine_coeffs: Vec<f64>,
    mass: f64,
    lambda_max: f64,
}

impl IntensityModel {
    /// Build a model from the cosine coefficients of its mean function.
    ///
    /// Enforces `Lambda(0) = 0` (within tolerance) and a nonnegative total
    /// mass; nonnegativity of the intensity itself is checked separately by
    /// [`validate_model`].
    pub fn new(tau: f64, theta: Vec<f64>) -> Result<Self> {
        let basis = CosineBasis::new(tau)?;
        if theta.is_empty() {
            return Err(Error::Model("coefficient vector is empty".into()));
        }
        if theta.iter().any(|c| !c.is_finite()) {
            return Err(Error::Model("coefficient vector has non-finite entries".into()));
        }
        let sqrt_tau = tau.sqrt();
        let sqrt_2_tau = (2.0 / tau).sqrt();
        // Lambda(0) and Lambda(tau) from the coefficients, with cos(pi l)
        // replaced by (-1)^l so the boundary values are free of libm rounding.
        let head = theta[0] / sqrt_tau;
        let at_zero = head + sqrt_2_tau * compensated_sum(theta.iter().skip(1).copied());
        let mass = head
            + sqrt_2_tau
                * compensated_sum(
                    theta
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(l, &c)| if l % 2 == 0 { c } else { -c }),
                );
        if !mass.is_finite() {
            return Err(Error::Model("total mass is not finite".into()));
        }
        let tol = BOUNDARY_TOL * mass.abs().max(1.0);
        if at_zero.abs() > tol {
            return Err(Error::Model(format!(
                "mean function must vanish at 0; got Lambda(0) = {at_zero:e}"
            )));
        }
        if mass < 0.0 {
            return Err(Error::Model(format!(
                "total mass Lambda(tau) = {mass} is negative"
            )));
        }
        let sine_coeffs: Vec<f64> = theta
            .iter()
            .enumerate()
            .skip(1)
            .map(|(l, &c)| -c * sqrt_2_tau * PI * l as f64 / tau)
            .collect();
        let lambda_max = compensated_sum(sine_coeffs.iter().map(|b| b.abs()));
        Ok(Self {
            basis,
            theta,
            sine_coeffs,
            mass,
            lambda_max,
        })
    }

    /// Model with intensity `lambda(t) = sum_k b[k-1] sin(pi k t / tau)`.
    pub fn from_sine_intensity(b: &[f64], tau: f64) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::Model("intensity coefficient vector is empty".into()));
        }
        let sqrt_tau = tau.sqrt();
        let mut theta = Vec::with_capacity(b.len() + 1);
        theta.push(
            sqrt_tau
                * compensated_sum(
                    b.iter()
                        .enumerate()
                        .map(|(i, &bk)| bk * tau / (PI * (i + 1) as f64)),
                ),
        );
        for (i, &bk) in b.iter().enumerate() {
            let k = (i + 1) as f64;
            theta.push(-bk * (tau / (PI * k)) * (tau / 2.0).sqrt());
        }
        Self::new(tau, theta)
    }

    /// The raised-cosine model `Lambda(t) = (S/2)(1 - cos(pi t / tau))`.
    pub fn raised_cosine(s: f64, tau: f64) -> Self {
        let theta = vec![(s / 2.0) * tau.sqrt(), -(s / 2.0) * (tau / 2.0).sqrt()];
        Self::new(tau, theta).expect("raised cosine model is always valid")
    }

    /// A two-harmonic model with intensity
    /// `lambda(t) = b (sin(pi t/tau) + 0.3 sin(2 pi t/tau))`, scaled to mass `s`.
    pub fn two_harmonic(s: f64, tau: f64) -> Self {
        let b1 = s * PI / (2.0 * tau);
        Self::from_sine_intensity(&[b1, 0.3 * b1], tau).expect("two-harmonic model is always valid")
    }

    pub fn tau(&self) -> f64 {
        self.basis.tau()
    }

    /// Total mass `S = Lambda(tau)`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Certified upper bound on the intensity: `sqrt(2/tau) sum |theta_l| pi l / tau`.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Cosine coefficients of the mean function.
    pub fn coeffs(&self) -> &[f64] {
        &self.theta
    }

    /// Index of the last nonzero cosine coefficient.
    pub fn degree(&self) -> usize {
        self.theta
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    /// `theta_l`, zero beyond the stored coefficients.
    pub fn mean_coeff(&self, l: usize) -> f64 {
        self.theta.get(l).copied().unwrap_or(0.0)
    }

    /// `Lambda(t)`.
    pub fn mean_at(&self, t: f64) -> Result<f64> {
        check_time(t, self.tau())?;
        Ok(self.mean_unchecked(t))
    }

    pub(crate) fn mean_unchecked(&self, t: f64) -> f64 {
        series_eval_unchecked(&self.theta, t, &self.basis)
    }

    /// `lambda(t) = Lambda'(t)`, the term-wise derivative of the series.
    pub fn intensity_at(&self, t: f64) -> Result<f64> {
        check_time(t, self.tau())?;
        Ok(self.intensity_unchecked(t))
    }

    pub(crate) fn intensity_unchecked(&self, t: f64) -> f64 {
        let tau = self.tau();
        self.sine_coeffs
            .iter()
            .enumerate()
            .map(|(i, &b)| b * (PI * (i + 1) as f64 * t / tau).sin())
            .sum()
    }

    /// Lipschitz bound for the intensity: `sup |lambda'| <= sum |b_k| pi k / tau`.
    pub fn intensity_lipschitz(&self) -> f64 {
        let tau = self.tau();
        compensated_sum(
            self.sine_coeffs
                .iter()
                .enumerate()
                .map(|(i, &b)| b.abs() * PI * (i + 1) as f64 / tau),
        )
    }

    /// `int_0^tau Lambda(t) dt = theta_0 sqrt(tau)`.
    pub fn mean_integral(&self) -> f64 {
        self.theta[0] * self.tau().sqrt()
    }

    /// Exact `g_j = int_0^tau cos(pi j t / tau) lambda(t) dt`.
    ///
    /// For the sine polynomial intensity this is the finite sum
    /// `sum_{k+j odd} b_k (tau/pi) 2k / (k^2 - j^2)`; `g_0` is the mass.
    pub fn intensity_cos_integral(&self, j: usize) -> f64 {
        if j == 0 {
            return self.mass;
        }
        let tau = self.tau();
        let jj = (j * j) as i64;
        compensated_sum(self.sine_coeffs.iter().enumerate().filter_map(|(i, &b)| {
            let k = i + 1;
            if (k + j) % 2 == 1 {
                let kk = (k * k) as i64;
                Some(b * (tau / PI) * 2.0 * k as f64 / (kk - jj) as f64)
            } else {
                None
            }
        }))
    }

    /// Stable identifier derived from the canonical model description.
    pub fn id(&self) -> String {
        let mut repr = String::new();
        repr.push_str("tau=");
        repr.push_str(&fmt_g17(self.tau()));
        repr.push_str(";theta=");
        for c in &self.theta {
            repr.push_str(&fmt_g17(*c));
            repr.push(',');
        }
        repr.push_str(";S=");
        repr.push_str(&fmt_g17(self.mass));
        format!("{:016x}", fnv1a64(repr.as_bytes()))
    }

    /// Parse the JSON model file schema `{"tau": .., "theta": [..], "S": ..}`.
    ///
    /// The declared mass is validated against the series, not trusted.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        let model = Self::new(file.tau, file.theta)?;
        let tol = BOUNDARY_TOL * file.s.abs().max(1.0);
        if (model.mass - file.s).abs() > tol {
            return Err(Error::Model(format!(
                "declared mass S = {} does not match the series value Lambda(tau) = {}",
                file.s, model.mass
            )));
        }
        Ok(model)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile {
            tau: self.tau(),
            theta: self.theta.clone(),
            s: self.mass,
        })
        .expect("model serialization cannot fail")
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// On-disk model schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub tau: f64,
    pub theta: Vec<f64>,
    #[serde(rename = "S")]
    pub s: f64,
}

/// Smoothness class parameters: coefficients must satisfy
/// `sum_l (pi l / tau)^{2m} theta_l^2 <= R` with mass `S` on period `tau`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EllipsoidSpec {
    pub m: u32,
    pub r: f64,
    pub s: f64,
    pub tau: f64,
}

impl EllipsoidSpec {
    pub fn new(m: u32, r: f64, s: f64, tau: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("smoothness m must be >= 2, got {m}")));
        }
        for (name, v) in [("R", r), ("S", s), ("tau", tau)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { m, r, s, tau })
    }
}

/// Smoothness functional `sum_{l>=1} (pi l / tau)^{2m} theta_l^2`.
pub fn sobolev_functional(theta: &[f64], m: u32, tau: f64) -> f64 {
    debug_assert!(m >= 1);
    compensated_sum(theta.iter().enumerate().skip(1).map(|(l, &c)| {
        (PI * l as f64 / tau).powi(2 * m as i32) * c * c
    }))
}

/// Outcome of a membership check; failures are fields, not errors.
#[derive(Debug, Clone, Serialize)]
pub struct ModelVerdict {
    pub member: bool,
    pub boundary_zero_ok: bool,
    pub mass_ok: bool,
    pub nonneg_ok: bool,
    pub sobolev_ok: bool,
    pub sobolev_value: f64,
    /// Certified lower bound for the intensity over the whole period.
    pub intensity_lower_bound: f64,
    pub tolerance: f64,
}

impl ModelVerdict {
    pub fn failure_reason(&self) -> Option<&'static str> {
        if !self.boundary_zero_ok {
            Some("boundary value Lambda(0) differs from 0")
        } else if !self.mass_ok {
            Some("mass Lambda(tau) differs from S")
        } else if !self.nonneg_ok {
            Some("intensity negativity")
        } else if !self.sobolev_ok {
            Some("Sobolev excess")
        } else {
            None
        }
    }
}

/// Check the four membership conditions for `model` against `spec`.
///
/// Nonnegativity of the intensity is established on a uniform grid of
/// `grid_size` nodes, refined by bisection wherever the Lipschitz modulus
/// bound cannot certify the gap between nodes.
pub fn validate_model(model: &IntensityModel, spec: &EllipsoidSpec, grid_size: usize) -> ModelVerdict {
    let tau = model.tau();
    let tol = BOUNDARY_TOL * spec.s.abs().max(1.0);

    let sqrt_tau = tau.sqrt();
    let sqrt_2_tau = (2.0 / tau).sqrt();
    let at_zero = model.theta[0] / sqrt_tau
        + sqrt_2_tau * compensated_sum(model.theta.iter().skip(1).copied());
    let boundary_zero_ok = at_zero.abs() <= tol;
    let mass_ok = (model.mass() - spec.s).abs() <= tol;

    let (nonneg_ok, intensity_lower_bound) = certify_nonnegative(model, grid_size.max(2), tol);

    let sobolev_value = sobolev_functional(model.coeffs(), spec.m, tau);
    let sobolev_ok = sobolev_value <= spec.r;

    ModelVerdict {
        member: boundary_zero_ok && mass_ok && nonneg_ok && sobolev_ok,
        boundary_zero_ok,
        mass_ok,
        nonneg_ok,
        sobolev_ok,
        sobolev_value,
        intensity_lower_bound,
        tolerance: tol,
    }
}

fn certify_nonnegative(model: &IntensityModel, grid_size: usize, tol: f64) -> (bool, f64) {
    const MAX_DEPTH: u32 = 48;
    let tau = model.tau();
    let lip = model.intensity_lipschitz();
    let mut lower = f64::INFINITY;

    let nodes: Vec<(f64, f64)> = (0..grid_size)
        .map(|i| {
            let t = tau * i as f64 / (grid_size - 1) as f64;
            (t, model.intensity_unchecked(t))
        })
        .collect();
    for &(_, f) in &nodes {
        if f < -tol {
            return (false, f);
        }
    }

    // Intervals the modulus bound cannot certify are bisected; an interval
    // certifies once min(f_a, f_b) - lip (b-a)/2 >= -tol.
    let mut stack: Vec<(f64, f64, f64, f64, u32)> = nodes
        .windows(2)
        .map(|w| (w[0].0, w[0].1, w[1].0, w[1].1, 0u32))
        .collect();
    while let Some((a, fa, b, fb, depth)) = stack.pop() {
        let cert = fa.min(fb) - lip * (b - a) / 2.0;
        if cert >= -tol || depth >= MAX_DEPTH {
            lower = lower.min(cert);
            continue;
        }
        let mid = 0.5 * (a + b);
        let fm = model.intensity_unchecked(mid);
        if fm < -tol {
            return (false, fm);
        }
        stack.push((a, fa, mid, fm, depth + 1));
        stack.push((mid, fm, b, fb, depth + 1));
    }
    (lower >= -tol || lower == f64::INFINITY, lower.min(0.0))
}

/// Cosine-basis coefficient `lambda_l = int_0^tau lambda(t) phi_l(t) dt`,
/// computed by quadrature (`l = 0` is exactly `S / sqrt(tau)`).
pub fn intensity_cosine_coeff(model: &IntensityModel, l: usize) -> f64 {
    let tau = model.tau();
    if l == 0 {
        return model.mass() / tau.sqrt();
    }
    let basis = CosineBasis::new(tau).expect("model period is valid");
    simpson(
        |t| model.intensity_unchecked(t) * basis.eval_unchecked(l, t),
        0.0,
        tau,
        DEFAULT_PANELS,
    )
}
