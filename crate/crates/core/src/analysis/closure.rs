//! Plant and secondary controllers closed into one autonomous model.

use std::collections::{BTreeMap, HashMap};

use super::delay::{pade_block, CommMask, DelayModel};
use crate::error::{Error, Result};
use crate::grid::{y_names, CompositePlant};
use crate::lti::{Connector, StateSpace};
use crate::synthesis::Controller;

/// Prefix of the controller output channels on the closed loop.
pub const REF_PREFIX: &str = "ref.";

/// Grid (0-based) that produces each measured channel.
pub fn measurement_origin(plant: &CompositePlant) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for g in 0..plant.n_grids() {
        for n in y_names(g + 1) {
            m.insert(n, g);
        }
    }
    m
}

/// Closes the loop around the plant.
///
/// Inputs are the plant disturbances `[dPL1.., dVw]`; outputs are every
/// plant output followed by `ref.<name>` for each reference driven by a
/// controller. Remote measurements pass through a Padé block when the
/// delay on that link is positive and are held at zero on failed links.
pub fn close_loop(
    plant: &CompositePlant,
    controllers: &[Controller],
    delay: Option<&DelayModel>,
    mask: &CommMask,
) -> Result<StateSpace> {
    if let Some(d) = delay {
        d.validate()?;
    }
    let origin = measurement_origin(plant);
    let mut net = Connector::new();
    net.add(plant.ss.clone().prefixed("p"));
    let mut refs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut missing = Vec::new();
    for (i, c) in controllers.iter().enumerate() {
        let kp = format!("k{i}");
        let home = *c.grids.first().ok_or_else(|| Error::validation("controller.grids", "empty"))?;
        net.add(c.ss.clone().prefixed(&kp));
        for m in c.measurements() {
            let Some(&g) = origin.get(m) else {
                missing.push(m.clone());
                continue;
            };
            let remote = !c.grids.contains(&g);
            if remote && c.grids.iter().any(|&k| mask.is_failed(g, k)) {
                continue;
            }
            let td = delay.map_or(0.0, |d| d.link_td(g, if remote { home } else { g }));
            let to = format!("{kp}.{m}");
            let from = format!("p.{m}");
            if td > 0.0 {
                let dp = format!("d{i}.{m}");
                net.add(pade_block(td)?.prefixed(&dp));
                net.link(&format!("{dp}.u"), &from, 1.0);
                net.link(&to, &format!("{dp}.y"), 1.0);
            } else {
                net.link(&to, &from, 1.0);
            }
        }
        for r in c.references() {
            if plant.ss.input_index(r).is_none() {
                missing.push(r.clone());
                continue;
            }
            let src = format!("{kp}.{r}");
            net.link(&format!("p.{r}"), &src, 1.0);
            refs.entry(r.clone()).or_default().push(src);
        }
    }
    if !missing.is_empty() {
        return Err(Error::Wiring(missing));
    }
    for &j in &plant.w_idx {
        let n = &plant.ss.inputs[j];
        net.input(n, &[(&format!("p.{n}"), 1.0)]);
    }
    for n in &plant.ss.outputs {
        net.output(n, &[(&format!("p.{n}"), 1.0)]);
    }
    for (r, srcs) in &refs {
        let terms: Vec<(&str, f64)> = srcs.iter().map(|s| (s.as_str(), 1.0)).collect();
        net.output(&format!("{REF_PREFIX}{r}"), &terms);
    }
    net.build()
}
