//! Communication delay blocks and link failure masks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::StateSpace;
use crate::numerics::Matrix;

/// Second-order Padé all-pass `(T²s² − 6Ts + 12)/(T²s² + 6Ts + 12)`.
///
/// Input `u`, output `y`, states `x1, x2`.
pub fn pade_block(td: f64) -> Result<StateSpace> {
    if !(td.is_finite() && td > 0.0) {
        return Err(Error::validation("delay.td", format!("must be positive, got {td}")));
    }
    // 1 − (12/T) s / (s² + (6/T) s + 12/T²) in controllable form
    let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -12.0 / (td * td), -6.0 / td]);
    let b = Matrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let c = Matrix::from_row_slice(1, 2, &[0.0, -12.0 / td]);
    let d = Matrix::from_element(1, 1, 1.0);
    StateSpace::new(a, b, c, d)?.named(&["u"], &["x1", "x2"], &["y"])
}

/// Delay on one directed link, grids numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDelay {
    pub from: usize,
    pub to: usize,
    pub td: f64,
}

/// Constant measurement delay applied between grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct DelayModel {
    /// Delay in seconds for every inter-grid link without an override.
    pub td: f64,
    /// Delay every measurement, local ones included.
    pub strict: bool,
    pub links: Vec<LinkDelay>,
}

impl DelayModel {
    pub fn uniform(td: f64) -> Self {
        Self { td, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.td) {
            return Err(Error::validation("delay.td", format!("must be non-negative, got {}", self.td)));
        }
        for l in &self.links {
            if !ok(l.td) || l.from == 0 || l.to == 0 {
                return Err(Error::validation(
                    "delay.links",
                    format!("link {} -> {} needs 1-based grids and td >= 0", l.from, l.to),
                ));
            }
        }
        Ok(())
    }

    /// Delay from grid `from` to the controller of grid `to` (0-based).
    pub fn link_td(&self, from: usize, to: usize) -> f64 {
        if from == to && !self.strict {
            return 0.0;
        }
        self.links
            .iter()
            .find(|l| l.from == from + 1 && l.to == to + 1)
            .map_or(self.td, |l| l.td)
    }
}

/// Failed directed links `(from, to)`, 0-based internally and 1-based in
/// configuration files.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<[usize; 2]>", into = "Vec<[usize; 2]>")]
pub struct CommMask {
    failed: BTreeSet<(usize, usize)>,
}

impl TryFrom<Vec<[usize; 2]>> for CommMask {
    type Error = Error;

    fn try_from(v: Vec<[usize; 2]>) -> Result<Self> {
        let mut m = CommMask::default();
        for [a, b] in v {
            if a == 0 || b == 0 {
                return Err(Error::validation("comm_mask", "grids are numbered from 1"));
            }
            m.fail(a - 1, b - 1);
        }
        Ok(m)
    }
}

impl From<CommMask> for Vec<[usize; 2]> {
    fn from(m: CommMask) -> Self {
        m.failed.iter().map(|&(a, b)| [a + 1, b + 1]).collect()
    }
}

impl CommMask {
    pub fn none() -> Self {
        Self::default()
    }

    /// Every inter-grid link among `n` grids failed.
    pub fn all(n: usize) -> Self {
        let mut m = Self::default();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    m.fail(a, b);
                }
            }
        }
        m
    }

    /// Grid `k` neither sends nor receives.
    pub fn isolate(n: usize, k: usize) -> Self {
        let mut m = Self::default();
        for j in (0..n).filter(|&j| j != k) {
            m.fail(j, k);
            m.fail(k, j);
        }
        m
    }

    pub fn fail(&mut self, from: usize, to: usize) -> &mut Self {
        self.failed.insert((from, to));
        self
    }

    pub fn is_failed(&self, from: usize, to: usize) -> bool {
        self.failed.contains(&(from, to))
    }

    pub fn is_empty(&self) -> bool {
        self.failed.is_empty()
    }

    /// The five communication conditions: intact, each grid isolated in
    /// turn, and no communication at all.
    pub fn conditions(n: usize) -> Vec<(String, CommMask)> {
        let mut v = vec![("intact".to_string(), Self::none())];
        for k in 0..n {
            v.push((format!("isolate{}", k + 1), Self::isolate(n, k)));
        }
        v.push(("none".to_string(), Self::all(n)));
        v
    }
}
