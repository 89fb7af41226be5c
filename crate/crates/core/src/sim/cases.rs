//! Controllers for each strategy under comparison.

use super::scenario::{Case, Scenario};
use crate::analysis::{close_loop, is_unstable, CommMask};
use crate::error::{Error, Result};
use crate::grid::CompositePlant;
use crate::reduction::{reduce_checked, Reduction};
use crate::synthesis::{
    make_pi_baseline, make_truncated_central, synthesize_decentralized, Controller, GammaOptions, PiGains,
    PlantOptions, SynthesisReport, Weights,
};

/// Controllers of one strategy, reduced where requested.
#[derive(Debug, Clone)]
pub struct CaseControllers {
    pub case: Case,
    /// Controllers used in closed loop.
    pub controllers: Vec<Controller>,
    /// Full-order controllers before reduction.
    pub full: Vec<Controller>,
    pub reports: Vec<SynthesisReport>,
    /// One entry per reduced controller.
    pub reductions: Vec<Reduction>,
}

/// Design settings shared by every strategy.
#[derive(Debug, Clone)]
pub struct DesignOptions {
    pub weights: Weights,
    pub plant_options: PlantOptions,
    pub gamma: GammaOptions,
    pub pi: PiGains,
    pub reduction_threshold: Option<f64>,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self {
            weights: Weights::default(),
            plant_options: PlantOptions::default(),
            gamma: GammaOptions::default(),
            pi: PiGains::default(),
            reduction_threshold: Some(0.999),
        }
    }
}

impl From<&Scenario> for DesignOptions {
    fn from(s: &Scenario) -> Self {
        Self {
            weights: s.weights.clone(),
            plant_options: s.plant_options.clone(),
            gamma: s.gamma,
            pi: s.pi,
            reduction_threshold: s.reduction_threshold,
        }
    }
}

fn loop_is_stable(plant: &CompositePlant, controllers: &[Controller]) -> Result<bool> {
    let cl = close_loop(plant, controllers, None, &CommMask::none())?;
    Ok(!is_unstable(cl.spectrum()?.max_real()))
}

/// Reduces each stable controller in turn. A candidate is accepted when
/// the nominal closed loop, with the controllers reduced so far, stays
/// stable; otherwise its order is raised.
pub fn reduce_controllers(
    plant: &CompositePlant,
    full: &[Controller],
    threshold: f64,
) -> Result<(Vec<Controller>, Vec<Reduction>)> {
    let mut current = full.to_vec();
    let mut reductions = Vec::new();
    for i in 0..full.len() {
        if full[i].order() == 0 || !full[i].is_stable()? {
            continue;
        }
        let red = reduce_checked(&full[i].ss, threshold, |cand| {
            let mut trial = current.clone();
            trial[i].ss = cand.clone();
            loop_is_stable(plant, &trial)
        })?;
        current[i].ss = red.sys.clone();
        reductions.push(red);
    }
    Ok((current, reductions))
}

/// Builds the controllers of `case` on the nominal plant.
pub fn build_case(plant: &CompositePlant, case: Case, opts: &DesignOptions) -> Result<CaseControllers> {
    let (full, reports) = match case {
        Case::DroopOnly => (vec![], vec![]),
        Case::Case2 => {
            let c = (0..plant.n_grids()).map(|k| make_pi_baseline(plant, k, opts.pi)).collect::<Result<Vec<_>>>()?;
            (c, vec![])
        }
        Case::Case1 => {
            let out = synthesize_decentralized(plant, &opts.weights, &opts.plant_options, &opts.gamma)?;
            out.into_iter().unzip()
        }
        Case::Case3 => {
            let (c, r) = make_truncated_central(plant, &opts.weights, &opts.plant_options, &opts.gamma)?;
            (c, vec![r])
        }
    };
    let reducible = matches!(case, Case::Case1 | Case::Case3);
    // reduction cannot repair a design whose full-order loop is unstable
    if reducible && !loop_is_stable(plant, &full)? {
        return Err(Error::NoController("nominal closed loop with the full-order controllers is unstable".into()));
    }
    let (controllers, reductions) = match opts.reduction_threshold {
        Some(t) if reducible => reduce_controllers(plant, &full, t)?,
        _ => (full.clone(), vec![]),
    };
    if !controllers.is_empty() && !loop_is_stable(plant, &controllers)? {
        log::warn!("{} closed loop is unstable on the nominal plant", case.label());
    }
    Ok(CaseControllers { case, controllers, full, reports, reductions })
}

/// Fails with a labelled error when the case cannot be built.
pub fn build_case_labelled(plant: &CompositePlant, case: Case, opts: &DesignOptions) -> Result<CaseControllers> {
    build_case(plant, case, opts).map_err(|e| match e {
        Error::NoController(m) => Error::NoController(format!("{}: {m}", case.label())),
        Error::Numerical(m) => Error::Numerical(format!("{}: {m}", case.label())),
        other => other,
    })
}
