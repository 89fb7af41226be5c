//! Frequency weights for the performance and disturbance channels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::StateSpace;
use crate::numerics::Matrix;

fn one() -> f64 {
    1.0
}

/// Scalar weight applied identically to every channel of a group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightingFunction {
    Unity {
        #[serde(default = "one")]
        gain: f64,
    },
    /// `gain·ω_c/(s + ω_c)`.
    LowPass {
        cutoff: f64,
        #[serde(default = "one")]
        gain: f64,
    },
    /// `gain·B s/(s² + B s + ω₀²)`, unit gain at the center `ω₀`.
    BandPass {
        bandwidth: f64,
        #[serde(default = "one")]
        center: f64,
        #[serde(default = "one")]
        gain: f64,
    },
}

impl Default for WeightingFunction {
    fn default() -> Self {
        WeightingFunction::Unity { gain: 1.0 }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be positive, got {v}")))
    }
}

impl WeightingFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightingFunction::Unity { gain } => positive("weight.gain", gain),
            WeightingFunction::LowPass { cutoff, gain } => {
                positive("weight.cutoff", cutoff)?;
                positive("weight.gain", gain)
            }
            WeightingFunction::BandPass { bandwidth, center, gain } => {
                positive("weight.bandwidth", bandwidth)?;
                positive("weight.center", center)?;
                positive("weight.gain", gain)
            }
        }
    }

    /// Single-channel realization.
    pub fn realize_scalar(&self) -> Result<StateSpace> {
        self.validate()?;
        let m = |r: usize, c: usize, v: &[f64]| Matrix::from_row_slice(r, c, v);
        match *self {
            WeightingFunction::Unity { gain } => Ok(StateSpace::static_gain(m(1, 1, &[gain]))),
            WeightingFunction::LowPass { cutoff, gain } => {
                StateSpace::new(m(1, 1, &[-cutoff]), m(1, 1, &[cutoff]), m(1, 1, &[gain]), m(1, 1, &[0.0]))
            }
            WeightingFunction::BandPass { bandwidth, center, gain } => StateSpace::new(
                m(2, 2, &[0.0, 1.0, -center * center, -bandwidth]),
                m(2, 1, &[0.0, 1.0]),
                m(1, 2, &[0.0, gain * bandwidth]),
                m(1, 1, &[0.0]),
            ),
        }
    }

    /// Diagonal realization over `n` channels named `{prefix}.in{i}` and
    /// `{prefix}.out{i}`.
    pub fn realize(&self, n: usize, prefix: &str) -> Result<StateSpace> {
        let one = self.realize_scalar()?;
        let copies: Vec<StateSpace> = (0..n).map(|_| one.clone()).collect();
        let refs: Vec<&StateSpace> = copies.iter().collect();
        let sys = StateSpace::append(&refs);
        let ns = one.n_states();
        let states: Vec<String> =
            (0..n).flat_map(|i| (0..ns).map(move |j| format!("{prefix}.x{i}_{j}"))).collect();
        let inputs: Vec<String> = (0..n).map(|i| format!("{prefix}.in{i}")).collect();
        let outputs: Vec<String> = (0..n).map(|i| format!("{prefix}.out{i}")).collect();
        sys.named(&inputs, &states, &outputs)
    }

    pub fn is_unity(&self) -> bool {
        matches!(self, WeightingFunction::Unity { gain } if *gain == 1.0)
    }
}

/// Weights on the performance outputs, control inputs and disturbances.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Weights {
    pub we: WeightingFunction,
    pub wu: WeightingFunction,
    pub wd: WeightingFunction,
}

impl Weights {
    /// The same weight on all three groups.
    pub fn uniform(w: WeightingFunction) -> Self {
        Self { we: w.clone(), wu: w.clone(), wd: w }
    }

    pub fn validate(&self) -> Result<()> {
        self.we.validate()?;
        self.wu.validate()?;
        self.wd.validate()
    }
}
