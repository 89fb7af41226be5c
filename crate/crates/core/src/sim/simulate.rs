//! Exact zero-order-hold simulation of closed loops.

use nalgebra::DVector;
use serde::Serialize;

use super::cases::{build_case, CaseControllers, DesignOptions};
use super::profile::DisturbanceProfile;
use super::scenario::Scenario;
use crate::analysis::{close_loop, is_unstable, REF_PREFIX};
use crate::error::{Error, Result};
use crate::grid::{perturb, CompositePlant, ConverterParams};
use crate::lti::StateSpace;
use crate::numerics::zoh_discretize;

/// Deviation metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    /// `|Δf_k|max` per grid (Hz).
    pub f_max: Vec<f64>,
    pub sum_f_max: f64,
    /// `Δf_k,rms` per grid (Hz).
    pub f_rms: Vec<f64>,
    pub sum_f_rms: f64,
    /// `|ΔV_dc|max` of the average DC voltage (pu).
    pub vdc_max: f64,
    pub vdc_rms: f64,
}

/// `{Σ_l x(l)² / L}^{1/2}` over every sample.
pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

pub fn peak(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

impl Metrics {
    pub fn from_series(df: &[Vec<f64>], dvdc: &[f64]) -> Self {
        let f_max: Vec<f64> = df.iter().map(|s| peak(s)).collect();
        let f_rms: Vec<f64> = df.iter().map(|s| rms(s)).collect();
        Self {
            sum_f_max: f_max.iter().sum(),
            sum_f_rms: f_rms.iter().sum(),
            f_max,
            f_rms,
            vdc_max: peak(dvdc),
            vdc_rms: rms(dvdc),
        }
    }
}

/// Sampled trajectories of one run.
#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub t: Vec<f64>,
    /// Column names after `t`.
    pub columns: Vec<String>,
    /// One series per column.
    pub series: Vec<Vec<f64>>,
    /// `Δf_k` (Hz) per grid.
    pub df: Vec<Vec<f64>>,
    /// Average DC voltage deviation (pu).
    pub dvdc: Vec<f64>,
    pub metrics: Metrics,
    /// Largest closed-loop eigenvalue real part.
    pub max_real: f64,
}

impl SimulationResult {
    pub fn unstable(&self) -> bool {
        is_unstable(self.max_real)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|i| self.series[i].as_slice())
    }
}

struct Channel {
    name: String,
    row: usize,
    offset: f64,
}

fn channels(cl: &StateSpace, plant: &CompositePlant) -> Result<Vec<Channel>> {
    let p = &plant.params;
    let n = p.grids.len();
    let row = |name: &str| cl.output_index(name).ok_or_else(|| Error::Wiring(vec![name.to_string()]));
    let mut out = Vec::new();
    for k in 1..=n {
        out.push(Channel { name: format!("f{k}"), row: row(&format!("df{k}"))?, offset: p.base.f_hz });
    }
    out.push(Channel { name: "Vdc".into(), row: row("dVdc_avg")?, offset: 1.0 });
    for (k, g) in p.grids.iter().enumerate() {
        out.push(Channel { name: format!("Pg{}", k + 1), row: row(&format!("dPg{}", k + 1))?, offset: g.sg.p0 });
    }
    for (k, g) in p.grids.iter().enumerate() {
        let p0 = match &g.converter {
            ConverterParams::Gsvsc(v) => v.p0,
            ConverterParams::Lcc(l) => l.p0,
        };
        out.push(Channel { name: format!("P{}", k + 1), row: row(&format!("dP{}", k + 1))?, offset: p0 });
    }
    for (i, o) in cl.outputs.iter().enumerate() {
        if let Some(r) = o.strip_prefix(REF_PREFIX) {
            out.push(Channel { name: r.to_string(), row: i, offset: 0.0 });
        }
    }
    Ok(out)
}

/// Simulates `cl` (from [`close_loop`]) under `profile`, sampling every
/// `h` seconds with inputs held over each period.
pub fn simulate_loop(
    cl: &StateSpace,
    plant: &CompositePlant,
    profile: &DisturbanceProfile,
    duration: f64,
    h: f64,
) -> Result<SimulationResult> {
    let n_grids = plant.n_grids();
    profile.validate(n_grids)?;
    if !(h > 0.0 && duration >= h) {
        return Err(Error::validation("sample_period", "must be positive and at most the duration"));
    }
    let max_real = cl.spectrum()?.max_real();
    let chans = channels(cl, plant)?;
    let rows: Vec<usize> = chans.iter().map(|c| c.row).collect();
    let c = cl.c.select_rows(&rows);
    let d = cl.d.select_rows(&rows);
    let (ad, bd) = zoh_discretize(&cl.a, &cl.b, h)?;
    let steps = (duration / h).round() as usize;
    let n = cl.n_states();
    let m = cl.n_inputs();
    if m != n_grids + 1 {
        return Err(Error::Dimension(format!("closed loop has {m} inputs, expected {}", n_grids + 1)));
    }
    let mut x = DVector::zeros(n);
    let mut xn = DVector::zeros(n);
    let mut y = DVector::zeros(rows.len());
    let mut t = Vec::with_capacity(steps + 1);
    let mut dev: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); rows.len()];
    for l in 0..=steps {
        let tl = l as f64 * h;
        let u = DVector::from_vec(profile.value_at(tl, n_grids));
        y.gemv(1.0, &c, &x, 0.0);
        y.gemv(1.0, &d, &u, 1.0);
        t.push(tl);
        for (s, v) in dev.iter_mut().zip(y.iter()) {
            s.push(*v);
        }
        if l < steps {
            xn.gemv(1.0, &ad, &x, 0.0);
            xn.gemv(1.0, &bd, &u, 1.0);
            std::mem::swap(&mut x, &mut xn);
        }
    }
    let df: Vec<Vec<f64>> = dev[..n_grids].to_vec();
    let dvdc = dev[n_grids].clone();
    let metrics = Metrics::from_series(&df, &dvdc);
    let series = chans
        .iter()
        .zip(dev)
        .map(|(ch, s)| if ch.offset == 0.0 { s } else { s.into_iter().map(|v| v + ch.offset).collect() })
        .collect();
    Ok(SimulationResult {
        t,
        columns: chans.into_iter().map(|c| c.name).collect(),
        series,
        df,
        dvdc,
        metrics,
        max_real,
    })
}

/// Runs a scenario with controllers already built for its case.
pub fn simulate_with(scenario: &Scenario, nominal: &CompositePlant, ctrl: &CaseControllers) -> Result<SimulationResult> {
    scenario.validate()?;
    let plant = perturb(nominal, &scenario.uncertainty)?;
    let delayed = scenario.delay.td > 0.0 || scenario.delay.links.iter().any(|l| l.td > 0.0);
    let cl = close_loop(&plant, &ctrl.controllers, delayed.then_some(&scenario.delay), &scenario.comm_mask)?;
    let profile = scenario.disturbance.materialize(plant.n_grids(), scenario.duration)?;
    let res = simulate_loop(&cl, &plant, &profile, scenario.duration, scenario.sample_period)?;
    if res.unstable() {
        log::warn!("{} closed loop is unstable (max real part {:.3e})", ctrl.case.label(), res.max_real);
    }
    Ok(res)
}

/// Builds the plant and the scenario's controllers, then simulates.
pub fn simulate(scenario: &Scenario) -> Result<(SimulationResult, CaseControllers)> {
    scenario.validate()?;
    let nominal = CompositePlant::build(&scenario.system_params()?)?;
    let ctrl = build_case(&nominal, scenario.case, &DesignOptions::from(scenario))?;
    let res = simulate_with(scenario, &nominal, &ctrl)?;
    Ok((res, ctrl))
}

