//! Closed-loop eigenvalue loci and the delay margin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closure::close_loop;
use super::delay::{CommMask, DelayModel};
use crate::error::{Error, Result};
use crate::grid::{perturb, CompositePlant, ConverterParams, UncertaintyGroup, UncertaintySpec};
use crate::par;
use crate::synthesis::Controller;

/// An eigenvalue with real part at or above `-UNSTABLE_TOL` counts as a
/// crossing.
pub const UNSTABLE_TOL: f64 = 1e-9;

/// Swept quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepAxis {
    /// VSC filter inductance in mH, applied to every grid-side VSC. The
    /// inner current loops stay tuned for the nominal inductance.
    FilterInductance,
    /// Uncertainty level δ with a fixed draw.
    Uncertainty {
        seed: u64,
        #[serde(default = "all_groups")]
        groups: Vec<UncertaintyGroup>,
    },
    /// Uniform inter-grid delay in seconds.
    Delay,
}

fn all_groups() -> Vec<UncertaintyGroup> {
    UncertaintySpec::default().groups
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::FilterInductance => "lf_mh",
            SweepAxis::Uncertainty { .. } => "delta",
            SweepAxis::Delay => "td_s",
        }
    }
}

/// Spectra along a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenLocus {
    pub parameter: String,
    pub values: Vec<f64>,
    pub spectra: Vec<Vec<Complex64>>,
    pub max_real: Vec<f64>,
    /// First value whose spectrum reaches the imaginary axis.
    pub first_unstable: Option<f64>,
}

/// Common closure settings for analyses.
#[derive(Debug, Clone, Default)]
pub struct LoopOptions {
    pub delay: Option<DelayModel>,
    pub mask: CommMask,
}

pub fn is_unstable(max_real: f64) -> bool {
    max_real >= -UNSTABLE_TOL
}

fn point(
    plant: &CompositePlant,
    controllers: &[Controller],
    opts: &LoopOptions,
    axis: &SweepAxis,
    v: f64,
) -> Result<Vec<Complex64>> {
    let cl = match axis {
        SweepAxis::FilterInductance => {
            let mut p = plant.params.clone();
            let lf = p.base.ac_inductance_pu(v);
            for g in &mut p.grids {
                if let ConverterParams::Gsvsc(vsc) = &mut g.converter {
                    vsc.inner_design_lf = Some(vsc.inner_design_lf.unwrap_or(vsc.lf));
                    vsc.lf = lf;
                }
            }
            close_loop(&CompositePlant::build(&p)?, controllers, opts.delay.as_ref(), &opts.mask)?
        }
        SweepAxis::Uncertainty { seed, groups } => {
            let spec = UncertaintySpec { level: v, seed: *seed, groups: groups.clone() };
            close_loop(&perturb(plant, &spec)?, controllers, opts.delay.as_ref(), &opts.mask)?
        }
        SweepAxis::Delay => {
            let mut d = opts.delay.clone().unwrap_or_default();
            d.td = v;
            close_loop(plant, controllers, (v > 0.0).then_some(&d), &opts.mask)?
        }
    };
    Ok(cl.spectrum()?.sorted())
}

/// Closed-loop spectra at each value of `axis`; values must ascend.
pub fn sweep_eigen(
    plant: &CompositePlant,
    controllers: &[Controller],
    opts: &LoopOptions,
    axis: &SweepAxis,
    values: &[f64],
) -> Result<EigenLocus> {
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::validation("sweep.values", "must be sorted ascending"));
    }
    let spectra = par::map(values, |&v| point(plant, controllers, opts, axis, v))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_real: Vec<f64> =
        spectra.iter().map(|s| s.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)).collect();
    let first_unstable = values.iter().zip(&max_real).find(|(_, &m)| is_unstable(m)).map(|(&v, _)| v);
    Ok(EigenLocus { parameter: axis.name().to_string(), values: values.to_vec(), spectra, max_real, first_unstable })
}

/// Result of the delay-margin search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayMargin {
    /// Smallest unstable delay found, `None` when stable up to `t_hi`.
    pub t_crit: Option<f64>,
    /// Final bracket, stable at `lo` and unstable at `hi`.
    pub lo: f64,
    pub hi: f64,
}

/// Coarse points scanned before bisection, so an isolated unstable
/// window below `t_hi` is not skipped by the first halving.
const DELAY_SCAN: usize = 48;

/// First delay at which the closed loop loses stability, to `tol`.
pub fn delay_margin(
    plant: &CompositePlant,
    controllers: &[Controller],
    mask: &CommMask,
    t_hi: f64,
    tol: f64,
) -> Result<DelayMargin> {
    if !(t_hi > 0.0 && tol > 0.0) {
        return Err(Error::validation("delay_margin", "t_hi and tol must be positive"));
    }
    let max_re = |t: f64| -> Result<f64> {
        let d = DelayModel::uniform(t);
        let cl = close_loop(plant, controllers, (t > 0.0).then_some(&d), mask)?;
        Ok(cl.spectrum()?.max_real())
    };
    let m0 = max_re(0.0)?;
    if is_unstable(m0) {
        return Err(Error::NotHurwitz(format!("closed loop unstable without delay (max real part {m0:.3e})")));
    }
    let grid: Vec<f64> = (1..=DELAY_SCAN).map(|i| t_hi * i as f64 / DELAY_SCAN as f64).collect();
    let scan = par::map(&grid, |&t| max_re(t)).into_iter().collect::<Result<Vec<_>>>()?;
    let Some(i) = scan.iter().position(|&m| is_unstable(m)) else {
        return Ok(DelayMargin { t_crit: None, lo: t_hi, hi: t_hi });
    };
    let mut lo = if i == 0 { 0.0 } else { grid[i - 1] };
    let mut hi = grid[i];
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_unstable(max_re(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DelayMargin { t_crit: Some(hi), lo, hi })
}
