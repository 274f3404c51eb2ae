//! The empirical mean function, its exact Fourier coefficients, and the
//! shrinkage estimator built from them.
//!
//! Coefficients of the empirical (step-function) estimator are computed in
//! closed form over the event times via integration by parts — never by
//! quadrature — so downstream Parseval identities hold to rounding error.

use crate::basis::{check_time, series_eval_unchecked, CosineBasis};
use crate::error::{Error, Result};
use crate::numeric::{fmt_g17, KahanSum};
use crate::simulate::ObservationSet;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

/// Which estimator a coefficient vector represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Empirical,
    Pinsker,
}

/// A coefficient vector with respect to the cosine basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    coeffs: Vec<f64>,
    tau: f64,
    n: usize,
    kind: EstimateKind,
}

impl SpectralEstimate {
    pub fn new(coeffs: Vec<f64>, tau: f64, n: usize, kind: EstimateKind) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(
                "coefficient vector must be non-empty and finite".into(),
            ));
        }
        let _ = CosineBasis::new(tau)?;
        Ok(Self { coeffs, tau, n, kind })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, l: usize) -> f64 {
        self.coeffs.get(l).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> EstimateKind {
        self.kind
    }

    /// Evaluate the series at `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_time(t, self.tau)?;
        let basis = CosineBasis::new(self.tau)?;
        Ok(series_eval_unchecked(&self.coeffs, t, &basis))
    }
}

/// Empirical mean function `(1/n) sum_j X_j(t)` at a point.
pub fn empirical_mean_eval(obs: &ObservationSet, t: f64) -> Result<f64> {
    check_time(t, obs.tau())?;
    let total: usize = obs
        .paths()
        .iter()
        .map(|p| p.events().partition_point(|&e| e <= t))
        .sum();
    Ok(total as f64 / obs.n() as f64)
}

/// Exact cosine-basis coefficients of the empirical mean function.
///
/// For events `t_i` over all periods:
/// coefficient 0 is `(1/(n sqrt(tau))) sum (tau - t_i)` and coefficient
/// `l >= 1` is `-(1/n) sqrt(2/tau) (tau / pi l) sum sin(pi l t_i / tau)`.
pub fn empirical_coeffs(obs: &ObservationSet, l_max: usize) -> SpectralEstimate {
    let tau = obs.tau();
    let n = obs.n() as f64;
    let mut coeffs = vec![0.0; l_max + 1];

    let mut acc = KahanSum::new();
    for p in obs.paths() {
        for &t in p.events() {
            acc.add(tau - t);
        }
    }
    coeffs[0] = acc.value() / (n * tau.sqrt());

    let scale = (2.0 / tau).sqrt() / n;
    for (l, c) in coeffs.iter_mut().enumerate().skip(1) {
        let w = PI * l as f64 / tau;
        let mut acc = KahanSum::new();
        for p in obs.paths() {
            for &t in p.events() {
                acc.add((w * t).sin());
            }
        }
        *c = -scale * (tau / (PI * l as f64)) * acc.value();
    }
    SpectralEstimate {
        coeffs,
        tau,
        n: obs.n(),
        kind: EstimateKind::Empirical,
    }
}

/// The asymptotically optimal shrinkage bandwidth
/// `alpha_n = [S m / (n R pi (2m-1)(m-1))]^{m/(2m-1)}`.
///
/// The bandwidth does not depend on the period (the cutoff does): it is the
/// asymptotic minimizer of the worst-case objective `H(c)`, and rescaling
/// time leaves it invariant. `tau` is accepted for validation so that one
/// call site carries the full estimator parameter set.
pub fn pinsker_bandwidth(m: u32, r: f64, s: f64, tau: f64, n: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!(
            "smoothness m must be ≥ 2 for the bandwidth formula, got {m}"
        )));
    }
    for (name, v) in [("R", r), ("S", s), ("tau", tau)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    if n == 0 {
        return Err(Error::Domain("n must be ≥ 1".into()));
    }
    let mf = m as f64;
    let base = s / (n as f64 * r * PI) * mf / ((2.0 * mf - 1.0) * (mf - 1.0));
    Ok(base.powf(mf / (2.0 * mf - 1.0)))
}

/// Cutoff `N = (tau/pi) alpha^{-1/m}`; the last possibly-nonzero weight
/// index is `floor(N)`.
pub fn cutoff(alpha: f64, tau: f64, m: u32) -> f64 {
    debug_assert!(alpha > 0.0 && m >= 1);
    (tau / PI) * alpha.powf(-1.0 / m as f64)
}

/// Shrinkage weights: `w_0 = 1`, `w_l = (1 - (pi l / tau)^m alpha)_+`.
pub fn shrink_weights(alpha: f64, m: u32, tau: f64, l_max: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(l_max + 1);
    w.push(1.0);
    for l in 1..=l_max {
        let x = (PI * l as f64 / tau).powi(m as i32) * alpha;
        w.push((1.0 - x).max(0.0));
    }
    w
}

/// Estimator parameters `(m, R, S, tau, n)` with the derived bandwidth,
/// cutoff and weight vector.
#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    m: u32,
    r: f64,
    s: f64,
    tau: f64,
    n: usize,
    alpha: f64,
    cutoff: f64,
    weights: Vec<f64>,
}

impl EstimatorConfig {
    pub fn new(m: u32, r: f64, s: f64, tau: f64, n: usize) -> Result<Self> {
        let alpha = pinsker_bandwidth(m, r, s, tau, n)?;
        Self::with_bandwidth(m, r, s, tau, n, alpha)
    }

    /// Exploratory constructor with an explicitly chosen bandwidth.
    pub fn with_bandwidth(m: u32, r: f64, s: f64, tau: f64, n: usize, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!(
                "bandwidth must be positive and finite, got {alpha}"
            )));
        }
        let cut = cutoff(alpha, tau, m);
        let last = if cut >= 1.0 { cut.floor() as usize } else { 0 };
        let weights = shrink_weights(alpha, m, tau, last);
        Ok(Self {
            m,
            r,
            s,
            tau,
            n,
            alpha,
            cutoff: cut,
            weights,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Cutoff as a real number.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Index of the last possibly-nonzero weight, `floor(N)`.
    pub fn cutoff_index(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_l`, zero beyond the cutoff.
    pub fn weight(&self, l: usize) -> f64 {
        self.weights.get(l).copied().unwrap_or(0.0)
    }
}

/// Apply the shrinkage weights coefficient-wise and truncate at the cutoff.
pub fn pinsker_estimate(
    emp: &SpectralEstimate,
    config: &EstimatorConfig,
) -> Result<SpectralEstimate> {
    if emp.tau() != config.tau() {
        return Err(Error::Domain(format!(
            "period mismatch: estimate has tau = {}, config has tau = {}",
            emp.tau(),
            config.tau()
        )));
    }
    let last = config.cutoff_index();
    if emp.len() < last + 1 {
        return Err(Error::Domain(format!(
            "empirical estimate has {} coefficients, need at least {}",
            emp.len(),
            last + 1
        )));
    }
    let coeffs: Vec<f64> = (0..=last)
        .map(|l| config.weight(l) * emp.coeff(l))
        .collect();
    Ok(SpectralEstimate {
        coeffs,
        tau: emp.tau(),
        n: emp.n(),
        kind: EstimateKind::Pinsker,
    })
}

/// Sidecar metadata accompanying a coefficient CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateMeta {
    pub kind: EstimateKind,
    pub n: usize,
    pub tau: f64,
    pub alpha: f64,
    pub cutoff: f64,
    pub m: u32,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

pub fn estimate_meta(est: &SpectralEstimate, config: &EstimatorConfig) -> EstimateMeta {
    EstimateMeta {
        kind: est.kind(),
        n: est.n(),
        tau: est.tau(),
        alpha: config.alpha(),
        cutoff: config.cutoff(),
        m: config.m(),
        r: config.r(),
        s: config.s(),
    }
}

/// Write `l,coefficient` rows.
pub fn write_estimate_csv<W: Write>(est: &SpectralEstimate, mut w: W) -> Result<()> {
    writeln!(w, "l,coefficient")?;
    for (l, c) in est.coeffs().iter().enumerate() {
        writeln!(w, "{},{}", l, fmt_g17(*c))?;
    }
    Ok(())
}

/// Read a coefficient CSV plus sidecar back into a `SpectralEstimate`.
pub fn read_estimate_csv<R: BufRead>(r: R, meta: &EstimateMeta) -> Result<SpectralEstimate> {
    let mut coeffs = Vec::new();
    for (line_no, line) in r.lines().enumerate() {
        let line = line?;
        if line_no == 0 {
            if line.trim() != "l,coefficient" {
                return Err(Error::Parse(format!(
                    "unexpected estimate CSV header: {line:?}"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (l, c) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected 'l,coefficient'", line_no + 1)))?;
        let l: usize = l
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad index: {e}", line_no + 1)))?;
        if l != coeffs.len() {
            return Err(Error::Parse(format!(
                "line {}: indices must be consecutive from 0",
                line_no + 1
            )));
        }
        let c: f64 = c
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad coefficient: {e}", line_no + 1)))?;
        coeffs.push(c);
    }
    SpectralEstimate::new(coeffs, meta.tau, meta.n, meta.kind)
}
