//! Comparison strategies: per-grid PI on the generator and the
//! decentralized truncation of a centralized H∞ design.

use serde::{Deserialize, Serialize};

use super::controller::Controller;
use super::dgkf::{gamma_iterate, realize_at, GammaOptions, SynthesisReport};
use crate::analysis::{close_loop, is_unstable, CommMask};
use super::generalized::{make_generalized_plant, PlantOptions};
use super::weights::Weights;
use crate::error::{Error, Result};
use crate::grid::CompositePlant;
use crate::lti::StateSpace;
use crate::numerics::Matrix;

/// PI gains acting on the frequency deviation in pu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PiGains {
    pub kp: f64,
    pub ki: f64,
}

impl Default for PiGains {
    fn default() -> Self {
        Self { kp: 0.5, ki: 2.0 }
    }
}

/// `ΔP_gk^ref = −(K_p Δf_k + K_i ∫Δf_k)` with `Δf_k` in pu; no converter
/// coordination.
pub fn make_pi_baseline(plant: &CompositePlant, k: usize, gains: PiGains) -> Result<Controller> {
    if !(gains.kp > 0.0 && gains.ki > 0.0 && gains.kp.is_finite() && gains.ki.is_finite()) {
        return Err(Error::validation("pi.gains", "kp and ki must be positive"));
    }
    if k >= plant.n_grids() {
        return Err(Error::validation("grid", format!("no grid {k}")));
    }
    let f = plant.params.base.f_hz;
    let g = k + 1;
    let ss = StateSpace::new(
        Matrix::zeros(1, 1),
        Matrix::from_element(1, 1, 1.0 / f),
        Matrix::from_element(1, 1, -gains.ki),
        Matrix::from_element(1, 1, -gains.kp / f),
    )?
    .named(&[format!("df{g}")], &[format!("pi{g}.int")], &[format!("dPg_ref{g}")])?;
    Ok(Controller::new(ss, vec![k], None))
}

/// Relative increases of γ tried, in order, when the truncated central
/// design does not close a stable nominal loop.
pub const CENTRAL_BACKOFF: [f64; 8] = [0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Keeps, for each grid, the references of that grid and the inputs of
/// `Y_Tk`.
fn truncate_central(plant: &CompositePlant, central: &Controller) -> Result<Vec<Controller>> {
    let mut out = Vec::new();
    for k in 0..plant.n_grids() {
        let ins = plant.t_names(k);
        let outs = plant.r_names(k);
        let ii: Vec<usize> = ins
            .iter()
            .map(|n| central.ss.input_index(n).ok_or_else(|| Error::Wiring(vec![n.clone()])))
            .collect::<Result<_>>()?;
        let oo: Vec<usize> = outs
            .iter()
            .map(|n| central.ss.output_index(n).ok_or_else(|| Error::Wiring(vec![n.clone()])))
            .collect::<Result<_>>()?;
        let mut ss = central.ss.select_inputs(&ii).select_outputs(&oo);
        ss.states = ss.states.iter().map(|s| format!("c{}.{s}", k + 1)).collect();
        out.push(Controller::new(ss, vec![k], central.gamma));
    }
    Ok(out)
}

/// One centralized synthesis over every grid, then one controller per
/// grid keeping only its own references and the measurements of `Y_Tk`.
///
/// The central design is realized at the first level of
/// `γ_opt (1 + b)`, `b` from [`CENTRAL_BACKOFF`], whose truncation closes
/// a stable nominal loop.
pub fn make_truncated_central(
    plant: &CompositePlant,
    weights: &Weights,
    popts: &PlantOptions,
    gopts: &GammaOptions,
) -> Result<(Vec<Controller>, SynthesisReport)> {
    let all: Vec<usize> = (0..plant.n_grids()).collect();
    let gp = make_generalized_plant(plant, &all, weights, popts)?;
    let (central, mut report) = gamma_iterate(&gp, gopts)?;
    let stable = |cs: &[Controller]| -> Result<bool> {
        let cl = close_loop(plant, cs, None, &CommMask::none())?;
        Ok(!is_unstable(cl.spectrum()?.max_real()))
    };
    let first = truncate_central(plant, &central)?;
    if stable(&first)? {
        return Ok((first, report));
    }
    let g0 = report.gamma;
    for b in CENTRAL_BACKOFF.iter().skip(1) {
        let g = g0 * (1.0 + b);
        let Ok((c, nrm)) = realize_at(&gp, g) else { continue };
        let cs = truncate_central(plant, &c)?;
        if stable(&cs)? {
            log::info!("truncated central design realized at γ = {g:.4} (back-off {b})");
            report.gamma = g;
            report.closed_loop_norm = nrm;
            return Ok((cs, report));
        }
    }
    Err(Error::NoController("no truncation of the central design stabilizes the nominal loop".into()))
}
