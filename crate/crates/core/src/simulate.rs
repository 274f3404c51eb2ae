//! Sampling of period-paths of an inhomogeneous Poisson process with
//! periodic intensity, by thinning a homogeneous candidate process.

use crate::basis::check_time;
use crate::error::{Error, Result};
use crate::model::IntensityModel;
use crate::numeric::fmt_g17;
use crate::rng::substream;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// Substream tag separating period sampling from other consumers of a seed.
const PERIOD_STREAM: u64 = 0x70;

/// Event times of one period, sorted ascending, all in `[0, tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodPath {
    events: Vec<f64>,
}

impl PeriodPath {
    pub fn new(mut events: Vec<f64>, tau: f64) -> Result<Self> {
        if events.iter().any(|t| !t.is_finite() || *t < 0.0 || *t >= tau) {
            return Err(Error::Domain(format!(
                "event times must lie in [0, {tau})"
            )));
        }
        events.sort_by(f64::total_cmp);
        Ok(Self { events })
    }

    pub fn events(&self) -> &[f64] {
        &self.events
    }

    pub fn count(&self) -> usize {
        self.events.len()
    }

    /// Number of events at or before `t`, i.e. the counting function.
    pub fn count_at(&self, t: f64, tau: f64) -> Result<usize> {
        check_time(t, tau)?;
        Ok(self.events.partition_point(|&e| e <= t))
    }
}

/// A sample of `n` independent period-paths, with seed provenance.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    paths: Vec<PeriodPath>,
    tau: f64,
    model_id: String,
    seed: u64,
}

impl ObservationSet {
    /// Wrap externally built paths (used for hand-written fixtures and file
    /// loading); provenance fields are filled with placeholders.
    pub fn from_paths(paths: Vec<PeriodPath>, tau: f64) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::Domain("n must be ≥ 1".into()));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain(format!("period must be positive, got {tau}")));
        }
        Ok(Self {
            paths,
            tau,
            model_id: "adhoc".into(),
            seed: 0,
        })
    }

    pub fn paths(&self) -> &[PeriodPath] {
        &self.paths
    }

    pub fn n(&self) -> usize {
        self.paths.len()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn total_events(&self) -> usize {
        self.paths.iter().map(|p| p.count()).sum()
    }
}

/// Draw one period-path by thinning: candidates arrive at the certified rate
/// bound and are kept with probability `lambda(t) / lambda_max`.
pub fn sample_period(model: &IntensityModel, rng: &mut ChaCha8Rng) -> PeriodPath {
    let tau = model.tau();
    let lambda_max = model.lambda_max();
    if lambda_max <= 0.0 {
        return PeriodPath { events: Vec::new() };
    }
    let expected = lambda_max * tau;
    let candidates = Poisson::new(expected)
        .expect("candidate rate is positive and finite")
        .sample(rng) as usize;
    let mut events = Vec::with_capacity(candidates / 2 + 1);
    for _ in 0..candidates {
        let t = rng.random_range(0.0..tau);
        let u: f64 = rng.random();
        if u * lambda_max < model.intensity_unchecked(t) {
            events.push(t);
        }
    }
    events.sort_by(f64::total_cmp);
    PeriodPath { events }
}

/// Sample `n` independent period-paths; path `j` uses the substream derived
/// from `(seed, j)`, so the result is identical for any worker count.
pub fn sample_observations(model: &IntensityModel, n: usize, seed: u64) -> Result<ObservationSet> {
    if n == 0 {
        return Err(Error::Domain("n must be ≥ 1".into()));
    }
    let paths: Vec<PeriodPath> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(seed, &[PERIOD_STREAM, j as u64]);
            sample_period(model, &mut rng)
        })
        .collect();
    Ok(ObservationSet {
        paths,
        tau: model.tau(),
        model_id: model.id(),
        seed,
    })
}

/// All event times of all periods, sorted ascending with multiplicities.
pub fn pooled_events(obs: &ObservationSet) -> Vec<f64> {
    let mut all: Vec<f64> = obs
        .paths
        .iter()
        .flat_map(|p| p.events().iter().copied())
        .collect();
    all.sort_by(f64::total_cmp);
    all
}

/// Sidecar metadata accompanying an observation CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationMeta {
    pub model_id: String,
    pub tau: f64,
    pub n: usize,
    pub seed: u64,
    pub sampler: String,
}

pub fn observation_meta(obs: &ObservationSet) -> ObservationMeta {
    ObservationMeta {
        model_id: obs.model_id.clone(),
        tau: obs.tau,
        n: obs.n(),
        seed: obs.seed,
        sampler: "thinning".into(),
    }
}

/// Write `period_index,event_time` rows, one per event.
pub fn write_observations_csv<W: Write>(obs: &ObservationSet, mut w: W) -> Result<()> {
    writeln!(w, "period_index,event_time")?;
    for (j, path) in obs.paths.iter().enumerate() {
        for &t in path.events() {
            writeln!(w, "{},{}", j, fmt_g17(t))?;
        }
    }
    Ok(())
}

/// Read an observation CSV plus its sidecar back into an `ObservationSet`.
pub fn read_observations_csv<R: BufRead>(r: R, meta: &ObservationMeta) -> Result<ObservationSet> {
    let mut events_by_period: Vec<Vec<f64>> = vec![Vec::new(); meta.n];
    for (line_no, line) in r.lines().enumerate() {
        let line = line?;
        if line_no == 0 {
            if line.trim() != "period_index,event_time" {
                return Err(Error::Parse(format!(
                    "unexpected observation CSV header: {line:?}"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (idx, time) = line.split_once(',').ok_or_else(|| {
            Error::Parse(format!("line {}: expected 'period_index,event_time'", line_no + 1))
        })?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad period index: {e}", line_no + 1)))?;
        let t: f64 = time
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad event time: {e}", line_no + 1)))?;
        if idx >= meta.n {
            return Err(Error::Parse(format!(
                "line {}: period index {idx} out of range for n = {}",
                line_no + 1,
                meta.n
            )));
        }
        events_by_period[idx].push(t);
    }
    let paths = events_by_period
        .into_iter()
        .map(|ev| PeriodPath::new(ev, meta.tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(ObservationSet {
        paths,
        tau: meta.tau,
        model_id: meta.model_id.clone(),
        seed: meta.seed,
    })
}
