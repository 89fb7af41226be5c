//! Decentralized H∞ synthesis and the comparison controllers.

mod baseline;
mod controller;
mod dgkf;
mod generalized;
mod weights;

pub use baseline::{make_pi_baseline, make_truncated_central, PiGains, CENTRAL_BACKOFF};
pub use controller::Controller;
pub use dgkf::{check_feasibility, gamma_iterate, realize_at, Feasibility, GammaOptions, GammaStep, SynthesisReport};
pub use generalized::{make_generalized_plant, performance_signals, GeneralizedPlant, PlantOptions};
pub use weights::{WeightingFunction, Weights};

use crate::error::Result;
use crate::grid::CompositePlant;

/// Synthesizes one controller per grid, each against its own generalized
/// plant.
pub fn synthesize_decentralized(
    plant: &CompositePlant,
    weights: &Weights,
    popts: &PlantOptions,
    gopts: &GammaOptions,
) -> Result<Vec<(Controller, SynthesisReport)>> {
    let grids: Vec<usize> = (0..plant.n_grids()).collect();
    crate::par::map(&grids, |&k| {
        let gp = make_generalized_plant(plant, &[k], weights, popts)?;
        gamma_iterate(&gp, gopts)
    })
    .into_iter()
    .collect()
}
