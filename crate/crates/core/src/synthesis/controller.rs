//! Controller container shared by every strategy.

use crate::error::Result;
use crate::lti::StateSpace;

/// Dynamic output feedback `ẋ_h = A_h x_h + B_h y`, `r = C_h x_h + D_h y`.
///
/// Input names are plant output channels, output names plant input
/// channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    pub ss: StateSpace,
    /// Grids (0-based) the controller acts on.
    pub grids: Vec<usize>,
    /// Performance level for H∞ designs.
    pub gamma: Option<f64>,
}

impl Controller {
    pub fn new(ss: StateSpace, grids: Vec<usize>, gamma: Option<f64>) -> Self {
        Self { ss, grids, gamma }
    }

    pub fn order(&self) -> usize {
        self.ss.n_states()
    }

    pub fn measurements(&self) -> &[String] {
        &self.ss.inputs
    }

    pub fn references(&self) -> &[String] {
        &self.ss.outputs
    }

    pub fn is_stable(&self) -> Result<bool> {
        self.ss.is_stable()
    }
}
