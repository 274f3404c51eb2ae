//! Helpers shared by the integration suites: distribution test statistics
//! and small statistical utilities. Everything here is oracle-side code,
//! independent of the library's computation paths.
#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided p-value of the Kolmogorov-Smirnov statistic `d` for sample size
/// `n`, using the asymptotic Kolmogorov distribution with the standard
/// small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let t = d * (sqrt_n + 0.12 + 0.11 / sqrt_n);
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-1.0f64).powi(k as i32 + 1) * (-2.0 * kf * kf * t * t).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// KS statistic of a sorted sample against the uniform distribution on [0, 1].
pub fn ks_statistic_uniform(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((x - lo).abs()).max((hi - x).abs());
    }
    d
}

fn poisson_pmf(k: usize, lambda: f64) -> f64 {
    let mut log_p = -lambda + k as f64 * lambda.ln();
    for j in 1..=k {
        log_p -= (j as f64).ln();
    }
    log_p.exp()
}

/// Chi-square goodness-of-fit p-value for observed counts against a Poisson
/// law with known mean; bins with small expectation are pooled into the tail.
pub fn poisson_gof_p_value(counts: &[usize], lambda: f64) -> f64 {
    let reps = counts.len() as f64;
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0.0f64; max_count + 1];
    for &c in counts {
        observed[c] += 1.0;
    }
    // expected counts per bin, pooling the upper tail so each bin has >= 5
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut exp_acc = 0.0;
    let mut obs_acc = 0.0;
    for k in 0..=max_count {
        exp_acc += reps * poisson_pmf(k, lambda);
        obs_acc += observed[k];
        if exp_acc >= 5.0 {
            bins.push((obs_acc, exp_acc));
            exp_acc = 0.0;
            obs_acc = 0.0;
        }
    }
    // remaining mass beyond the last bin edge
    let covered: f64 = bins.iter().map(|b| b.1).sum::<f64>() + exp_acc;
    let tail_exp = reps - covered + exp_acc;
    let tail_obs = obs_acc;
    if bins.is_empty() {
        bins.push((tail_obs, tail_exp));
    } else if tail_exp < 5.0 {
        let last = bins.last_mut().expect("non-empty");
        last.0 += tail_obs;
        last.1 += tail_exp;
    } else {
        bins.push((tail_obs, tail_exp));
    }
    let stat: f64 = bins
        .iter()
        .map(|&(o, e)| {
            let d = o - e;
            d * d / e
        })
        .sum();
    let dof = (bins.len() - 1).max(1) as f64;
    let chi = ChiSquared::new(dof).expect("valid dof");
    1.0 - chi.cdf(stat)
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn se_of_mean(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Standard error of the sample variance (moment-based).
pub fn se_of_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let s2 = variance(xs);
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    ((m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
}
