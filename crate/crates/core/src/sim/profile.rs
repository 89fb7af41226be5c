//! Load and wind disturbance profiles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step of every load at `onset`, optionally with a wind-speed step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepProfile {
    pub onset: f64,
    /// `ΔP_Lk` per grid (pu).
    pub loads: Vec<f64>,
    /// `ΔV_w` (m/s).
    #[serde(default)]
    pub wind: f64,
}

/// Linear interpolation between knots, held constant outside them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampProfile {
    pub times: Vec<f64>,
    /// One row `[ΔP_L1.., ΔV_w]` per knot.
    pub values: Vec<Vec<f64>>,
}

/// Uniformly sampled series, zero-order held between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledSeries {
    pub period: f64,
    /// One row `[ΔP_L1.., ΔV_w]` per sample, the first at `t = 0`.
    pub values: Vec<Vec<f64>>,
}

/// Disturbance `[ΔP_L1.., ΔV_w](t)` driving a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisturbanceProfile {
    Step(StepProfile),
    PiecewiseRamp(RampProfile),
    SampledSeries(SampledSeries),
}

fn check_rows(rows: &[Vec<f64>], width: usize, field: &str) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::validation(field, "needs at least one row"));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::validation(field, format!("row {i} has {} values, expected {width}", r.len())));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(field, format!("row {i} is not finite")));
        }
    }
    Ok(())
}

impl DisturbanceProfile {
    /// Checks the profile against `n_grids` loads plus the wind channel.
    pub fn validate(&self, n_grids: usize) -> Result<()> {
        let w = n_grids + 1;
        match self {
            DisturbanceProfile::Step(s) => {
                if s.loads.len() != n_grids {
                    return Err(Error::validation("disturbance.loads", format!("expected {n_grids} values")));
                }
                if !s.onset.is_finite() || s.loads.iter().chain([&s.wind]).any(|v| !v.is_finite()) {
                    return Err(Error::validation("disturbance", "values must be finite"));
                }
            }
            DisturbanceProfile::PiecewiseRamp(r) => {
                check_rows(&r.values, w, "disturbance.values")?;
                if r.times.len() != r.values.len() || r.times.windows(2).any(|t| t[1] < t[0]) {
                    return Err(Error::validation("disturbance.times", "must ascend and match values"));
                }
            }
            DisturbanceProfile::SampledSeries(s) => {
                check_rows(&s.values, w, "disturbance.values")?;
                if !(s.period.is_finite() && s.period > 0.0) {
                    return Err(Error::validation("disturbance.period", "must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Disturbance vector at time `t`.
    pub fn value_at(&self, t: f64, n_grids: usize) -> Vec<f64> {
        match self {
            DisturbanceProfile::Step(s) => {
                if t >= s.onset {
                    s.loads.iter().copied().chain([s.wind]).collect()
                } else {
                    vec![0.0; n_grids + 1]
                }
            }
            DisturbanceProfile::PiecewiseRamp(r) => {
                let i = r.times.partition_point(|&x| x <= t);
                if i == 0 {
                    return r.values[0].clone();
                }
                if i == r.times.len() {
                    return r.values[i - 1].clone();
                }
                let (t0, t1) = (r.times[i - 1], r.times[i]);
                let a = if t1 > t0 { (t - t0) / (t1 - t0) } else { 1.0 };
                r.values[i - 1].iter().zip(&r.values[i]).map(|(x, y)| x + a * (y - x)).collect()
            }
            DisturbanceProfile::SampledSeries(s) => {
                // small guard so sample instants land on their own sample
                let i = ((t / s.period) + 1e-9).floor().max(0.0) as usize;
                s.values[i.min(s.values.len() - 1)].clone()
            }
        }
    }

    /// Multiplies every channel by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let sc = |rows: &[Vec<f64>]| rows.iter().map(|r| r.iter().map(|v| v * k).collect()).collect();
        match self {
            DisturbanceProfile::Step(s) => DisturbanceProfile::Step(StepProfile {
                onset: s.onset,
                loads: s.loads.iter().map(|v| v * k).collect(),
                wind: s.wind * k,
            }),
            DisturbanceProfile::PiecewiseRamp(r) => {
                DisturbanceProfile::PiecewiseRamp(RampProfile { times: r.times.clone(), values: sc(&r.values) })
            }
            DisturbanceProfile::SampledSeries(s) => {
                DisturbanceProfile::SampledSeries(SampledSeries { period: s.period, values: sc(&s.values) })
            }
        }
    }
}

/// Sample period of generated regulation-like series (s).
pub const REGD_PERIOD: f64 = 0.1;
/// Correlation time of the generated series (s).
pub const REGD_TAU: f64 = 2.0;

/// Zero-mean first-order Gauss–Markov series scaled to peak `amplitude`.
pub fn regd_series(seed: u64, stream: u64, duration: f64, amplitude: f64) -> Result<Vec<f64>> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::validation("duration", format!("must be positive, got {duration}")));
    }
    let n = (duration / REGD_PERIOD).ceil() as usize + 1;
    if amplitude == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let a = (-REGD_PERIOD / REGD_TAU).exp();
    let g = (1.0 - a * a).sqrt();
    let mut x = 0.0;
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        let e: f64 = StandardNormal.sample(&mut rng);
        x = a * x + g * e;
        v.push(x);
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let peak = v.iter().fold(0.0f64, |m, x| m.max((x - mean).abs()));
    let k = if peak > 0.0 { amplitude / peak } else { 0.0 };
    Ok(v.into_iter().map(|x| (x - mean) * k).collect())
}

/// Regulation-signal-like load series for each grid and a wind-speed
/// series, sampled every 100 ms. Synthetic stand-in for recorded
/// regulation dispatch data.
pub fn gen_regd_like(
    seed: u64,
    duration: f64,
    amplitude: f64,
    n_grids: usize,
    wind_amplitude: f64,
) -> Result<DisturbanceProfile> {
    let mut cols = Vec::with_capacity(n_grids + 1);
    for k in 0..n_grids {
        cols.push(regd_series(seed, k as u64, duration, amplitude)?);
    }
    cols.push(regd_series(seed, n_grids as u64, duration, wind_amplitude)?);
    let n = cols[0].len();
    let values = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok(DisturbanceProfile::SampledSeries(SampledSeries { period: REGD_PERIOD, values }))
}
