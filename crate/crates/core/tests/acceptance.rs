//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them). Every tolerance is pinned here.
//!
//! Reference scenario: the raised-cosine model with mass 5 on the unit
//! period, smoothness order m = 2, radius calibrated to the model's own
//! smoothness functional ("boundary" calibration) unless stated otherwise.

mod common;

use common::*;
use pinsker::estimate::{empirical_coeffs, pinsker_bandwidth, EstimatorConfig};
use pinsker::model::{sobolev_functional, IntensityModel};
use pinsker::numeric::simpson;
use pinsker::risk::{
    convergence_sweep, exact_excess, h_objective, mise_monte_carlo, sigma_sq, RadiusMode,
    SweepMode,
};
use pinsker::rng::derive_seed;
use pinsker::simulate::{pooled_events, sample_observations, write_observations_csv};
use std::f64::consts::PI;
use std::time::Instant;

fn raised() -> IntensityModel {
    IntensityModel::raised_cosine(5.0, 1.0)
}

fn boundary_config(n: usize) -> EstimatorConfig {
    let model = raised();
    let r = sobolev_functional(model.coeffs(), 2, 1.0);
    EstimatorConfig::new(2, r, model.mass(), 1.0, n).unwrap()
}

fn report(criterion: u32, ok: bool, details: &str) {
    println!(
        "acceptance criterion {criterion}: {} — {details}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {details}");
}

/// Criterion 1: Monte Carlo MISE of the empirical estimator reproduces the
/// first-order identity (1/n) int Lambda = 0.05 within 3 SE in under 30 s.
#[test]
fn criterion_1_first_order_identity() {
    let start = Instant::now();
    let model = raised();
    let run = mise_monte_carlo(&model, None, 50, 2000, 20_2020).unwrap();
    let target = model.mean_integral() / 50.0;
    let gap = (run.mise - target).abs();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = gap <= 3.0 * run.mise_se && (target - 0.05).abs() < 1e-12 && elapsed < 30.0;
    report(
        1,
        ok,
        &format!(
            "MISE {:.6} vs (1/n)∫Λ = {target:.6}, |Δ| = {gap:.2e} ≤ 3·SE = {:.2e}, {elapsed:.2} s",
            run.mise,
            3.0 * run.mise_se
        ),
    );
}

/// Criterion 2: the closed-form coefficient variance matches the Monte Carlo
/// variance (4 SE, l = 1..5, n = 50, 5000 replications) and the independent
/// double-integral oracle to 1e-8 at l = 1.
#[test]
fn criterion_2_variance_closed_form() {
    let model = raised();
    let (n, reps) = (50usize, 5000usize);
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); 6];
    for r in 0..reps {
        let obs = sample_observations(&model, n, derive_seed(77_000, r as u64)).unwrap();
        let est = empirical_coeffs(&obs, 5);
        for l in 1..=5 {
            samples[l].push(est.coeff(l));
        }
    }
    let mut ok = true;
    let mut details = String::new();
    for l in 1..=5usize {
        let closed = sigma_sq(&model, l, n).unwrap();
        let v = variance(&samples[l]);
        let band = 4.0 * se_of_variance(&samples[l]);
        if (v - closed).abs() > band {
            ok = false;
        }
        if l == 1 {
            details = format!("l=1: MC {v:.7} vs closed form {closed:.7} (4·SE {band:.1e})");
        }
    }

    // double-integral oracle at l = 1, quadrature on both integrals
    let oracle = {
        let inner_sq = |t: f64| {
            let inner = simpson(|s: f64| 2.0f64.sqrt() * (PI * s).cos(), t, 1.0, 2048);
            inner * inner * model.intensity_at(t).unwrap()
        };
        simpson(inner_sq, 0.0, 1.0, 1 << 12) / n as f64
    };
    let closed1 = sigma_sq(&model, 1, n).unwrap();
    let oracle_gap = (closed1 - oracle).abs() / oracle;
    if oracle_gap > 1e-8 {
        ok = false;
    }
    // frozen value of the closed form (see the variance derivation note in
    // the risk module: the double-integral oracle pins this normalization)
    if (closed1 - 0.013509491152311703).abs() > 1e-14 {
        ok = false;
    }
    report(
        2,
        ok,
        &format!("{details}; double-integral oracle gap {oracle_gap:.2e} ≤ 1e-8"),
    );
}

/// Criterion 3: the deterministic excess matches the common-random-number
/// Monte Carlo estimate within 3 SE at n = 50 and n = 500.
#[test]
fn criterion_3_exact_excess() {
    let model = raised();
    let mut ok = true;
    let mut details = String::new();
    for n in [50usize, 500] {
        let cfg = boundary_config(n);
        let exact = exact_excess(&model, &cfg);
        let run = mise_monte_carlo(&model, Some(&cfg), n, 2000, 31_337).unwrap();
        let mc = run.excess_mc.unwrap();
        let se = run.excess_mc_se.unwrap();
        if (mc - exact).abs() > 3.0 * se {
            ok = false;
        }
        details.push_str(&format!(
            "n={n}: exact {exact:.3e}, MC {mc:.3e} ± {se:.1e}; "
        ));
    }
    report(3, ok, details.trim_end_matches("; "));
}

/// Criterion 4: a 10^4-point log-grid search of the bandwidth objective
/// recovers the closed-form bandwidth within 2% at n = 10^6, and the
/// objective value at the optimum is within 5% of its asymptotic form at
/// n = 10^8, all in under 5 s.
#[test]
fn criterion_4_bandwidth_optimality() {
    let start = Instant::now();
    let alpha6 = pinsker_bandwidth(2, 1.0, 1.0, 1.0, 1_000_000).unwrap();
    let (lo, hi) = (alpha6 / 100.0, alpha6 * 100.0);
    let mut best = (f64::INFINITY, lo);
    for i in 0..10_000 {
        let c = lo * (hi / lo).powf(i as f64 / 9999.0);
        let h = h_objective(c, 2, 1.0, 1.0, 1.0, 1_000_000).unwrap();
        if h < best.0 {
            best = (h, c);
        }
    }
    let grid_gap = (best.1 - alpha6).abs() / alpha6;

    let alpha8 = pinsker_bandwidth(2, 1.0, 1.0, 1.0, 100_000_000).unwrap();
    let h8 = h_objective(alpha8, 2, 1.0, 1.0, 1.0, 100_000_000).unwrap();
    let asymptote = -3.0 * alpha8 * alpha8;
    let h_gap = (h8 / asymptote - 1.0).abs();

    let elapsed = start.elapsed().as_secs_f64();
    let ok = grid_gap <= 0.02 && h_gap <= 0.05 && elapsed < 5.0;
    report(
        4,
        ok,
        &format!(
            "grid argmin gap {grid_gap:.4} ≤ 2%, H(α*)/asymptote − 1 = {h_gap:.4} ≤ 5%, {elapsed:.2} s"
        ),
    );
}

/// Criterion 5: exact-mode sweep at boundary calibration — the ratio of the
/// normalized excess to the limiting constant increases strictly toward 1
/// over n in {1e4, 1e6, 1e8}, tightening at least fivefold, in under 10 s.
#[test]
fn criterion_5_second_order_limit() {
    let start = Instant::now();
    let rows = convergence_sweep(
        &raised(),
        2,
        RadiusMode::Boundary,
        &[10_000, 1_000_000, 100_000_000],
        SweepMode::Exact,
        0,
    )
    .unwrap();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let elapsed = start.elapsed().as_secs_f64();

    let increasing_to_one =
        ratios.windows(2).all(|w| w[0] < w[1]) && ratios.iter().all(|&r| r > 0.0 && r < 1.0);
    let factor = (ratios[0] - 1.0).abs() / (ratios[2] - 1.0).abs();
    let ok = increasing_to_one && factor >= 5.0 && elapsed < 10.0;
    report(
        5,
        ok,
        &format!(
            "ratios {:.8}, {:.8}, {:.8} → 1; |ratio−1| tightens ×{factor:.0} ≥ 5; {elapsed:.2} s",
            ratios[0], ratios[1], ratios[2]
        ),
    );
}

/// Criterion 6: the computable bound on the dropped cross term, divided by
/// n^{-2m/(2m-1)}, decreases through the sweep and is below 1e-2 at n = 1e8.
#[test]
fn criterion_6_third_term_negligibility() {
    let rows = convergence_sweep(
        &raised(),
        2,
        RadiusMode::Boundary,
        &[10_000, 1_000_000, 100_000_000],
        SweepMode::Exact,
        0,
    )
    .unwrap();
    let bounds: Vec<f64> = rows.iter().map(|r| r.third_term_bound_ratio).collect();
    let decreasing = bounds.windows(2).all(|w| w[1] < w[0]);
    let ok = decreasing && bounds[2] < 1e-2;
    report(
        6,
        ok,
        &format!(
            "normalized bounds {:.3e}, {:.3e}, {:.3e}; final < 1e-2",
            bounds[0], bounds[1], bounds[2]
        ),
    );
}

/// Criterion 7: structural invariants — Parseval spectral-vs-quadrature
/// agreement, closed-form coefficients vs step-function integration, weight
/// vector shape, and the Poisson count goodness of fit.
#[test]
fn criterion_7_structural_invariants() {
    let model = raised();
    let mut ok = true;
    let mut notes = Vec::new();

    // (a) spectral squared error vs quadrature cross-check
    let run = mise_monte_carlo(&model, None, 50, 2, 90_210).unwrap();
    if run.parseval_gap >= 1e-6 {
        ok = false;
    }
    notes.push(format!("Parseval gap {:.1e} < 1e-6", run.parseval_gap));

    // (b) closed-form coefficients vs exact integration of the step function
    let obs = sample_observations(&model, 25, 555).unwrap();
    let est = empirical_coeffs(&obs, 50);
    let pooled = pooled_events(&obs);
    let nf = obs.n() as f64;
    let mut worst = 0.0f64;
    for l in 0..=50usize {
        let mut total = 0.0;
        let mut start = 0.0;
        for k in 0..=pooled.len() {
            let end = pooled.get(k).copied().unwrap_or(1.0);
            if end > start && k > 0 {
                let seg = if l == 0 {
                    end - start
                } else {
                    let w = PI * l as f64;
                    2.0f64.sqrt() * ((w * end).sin() - (w * start).sin()) / w
                };
                total += (k as f64 / nf) * seg;
            }
            start = end;
        }
        worst = worst.max((est.coeff(l) - total).abs());
    }
    if worst >= 1e-9 {
        ok = false;
    }
    notes.push(format!("coefficient gap {worst:.1e} < 1e-9"));

    // (c) weight vector shape
    let cfg = boundary_config(50);
    let w = cfg.weights();
    let shape_ok = w[0] == 1.0
        && w.windows(2).all(|p| p[1] <= p[0])
        && w.iter().all(|&x| (0.0..=1.0).contains(&x))
        && cfg.weight(cfg.cutoff_index() + 1) == 0.0
        && (cfg.cutoff_index() as f64) <= cfg.cutoff();
    if !shape_ok {
        ok = false;
    }
    notes.push(format!(
        "weights: w0=1, non-increasing, zero beyond {}",
        cfg.cutoff_index()
    ));

    // (d) per-period counts fit Poisson(S) at 10^5 replications
    let obs = sample_observations(&model, 100_000, 424_242).unwrap();
    let counts: Vec<usize> = obs.paths().iter().map(|p| p.count()).collect();
    let p = poisson_gof_p_value(&counts, 5.0);
    if p <= 0.001 {
        ok = false;
    }
    notes.push(format!("Poisson GOF p = {p:.3} > 0.001"));

    report(7, ok, &notes.join("; "));
}

/// Criterion 8: identical (config, seed) produce byte-identical CSV outputs
/// with one worker and with many workers.
#[test]
fn criterion_8_reproducibility() {
    let model = raised();
    let render = || {
        let obs = sample_observations(&model, 200, 4711).unwrap();
        let mut obs_csv = Vec::new();
        write_observations_csv(&obs, &mut obs_csv).unwrap();

        let rows = convergence_sweep(
            &model,
            2,
            RadiusMode::Boundary,
            &[30, 60],
            SweepMode::MonteCarlo { reps: 50 },
            4711,
        )
        .unwrap();
        let mut sweep_csv = Vec::new();
        pinsker::risk::write_sweep_csv(&rows, &mut sweep_csv).unwrap();
        (obs_csv, sweep_csv)
    };
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(render);
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(render);
    let rerun = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(render);
    let ok = single == many && many == rerun;
    report(
        8,
        ok,
        &format!(
            "observation CSV ({} bytes) and sweep CSV ({} bytes) byte-identical across 1/8 workers and reruns",
            single.0.len(),
            single.1.len()
        ),
    );
}
