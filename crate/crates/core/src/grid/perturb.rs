//! Parametric model uncertainty.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::assemble::CompositePlant;
use super::params::SystemParams;
use crate::error::{Error, Result};

/// Plant blocks that take their values from the perturbed rebuild.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UncertaintyGroup {
    #[serde(rename = "A_E")]
    A,
    #[serde(rename = "B_rEk")]
    Br,
    #[serde(rename = "B_drk")]
    Bdr,
    #[serde(rename = "C_Tk")]
    Ct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintySpec {
    pub level: f64,
    pub seed: u64,
    pub groups: Vec<UncertaintyGroup>,
}

impl Default for UncertaintySpec {
    fn default() -> Self {
        Self {
            level: 0.0,
            seed: 0,
            groups: vec![UncertaintyGroup::A, UncertaintyGroup::Br, UncertaintyGroup::Bdr, UncertaintyGroup::Ct],
        }
    }
}

/// Smallest multiplier applied to a parameter, keeping it positive.
const MIN_FACTOR: f64 = 0.05;

/// Multiplies every physical parameter by `1 + ε`, `ε ~ U[−δ, δ]`.
pub fn perturb_params(params: &SystemParams, level: f64, seed: u64) -> Result<SystemParams> {
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::validation("uncertainty.level", format!("must lie in [0, 1], got {level}")));
    }
    let mut p = params.clone();
    if level == 0.0 {
        return Ok(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    p.visit_physical(&mut |_, v| {
        let eps: f64 = rng.random_range(-level..=level);
        *v *= (1.0 + eps).max(MIN_FACTOR);
    });
    Ok(p)
}

/// Rebuilds the plant from perturbed parameters. Blocks outside
/// `spec.groups` keep their nominal values.
pub fn perturb(plant: &CompositePlant, spec: &UncertaintySpec) -> Result<CompositePlant> {
    if spec.level == 0.0 {
        perturb_params(&plant.params, 0.0, spec.seed)?;
        return Ok(plant.clone());
    }
    let params = perturb_params(&plant.params, spec.level, spec.seed)?;
    let pert = CompositePlant::build(&params)?;
    let has = |g| spec.groups.contains(&g);
    let mut out = plant.clone();
    if has(UncertaintyGroup::A) {
        out.ss.a = pert.ss.a.clone();
    }
    let r_cols: Vec<usize> = plant.r_idx.iter().flatten().copied().collect();
    if has(UncertaintyGroup::Br) || has(UncertaintyGroup::Bdr) {
        for &j in &r_cols {
            out.ss.b.set_column(j, &pert.ss.b.column(j));
        }
    }
    if has(UncertaintyGroup::Bdr) {
        for &j in &plant.w_idx {
            out.ss.b.set_column(j, &pert.ss.b.column(j));
        }
    }
    if has(UncertaintyGroup::Ct) {
        out.ss.c = pert.ss.c.clone();
        out.ss.d = pert.ss.d.clone();
    }
    out.params = params;
    Ok(out)
}
