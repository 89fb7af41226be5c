//! Scenario configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::io::read_disturbance_csv;
use super::profile::{gen_regd_like, DisturbanceProfile, RampProfile, SampledSeries, StepProfile};
use crate::analysis::{CommMask, DelayModel};
use crate::error::{Error, Result};
use crate::grid::{SystemParams, UncertaintySpec};
use crate::synthesis::{GammaOptions, PiGains, PlantOptions, Weights};

pub const SCHEMA_VERSION: u32 = 1;

/// Control strategy under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Decentralized H∞ per grid with inter-grid measurements.
    Case1,
    /// Per-grid PI on the generator only.
    Case2,
    /// Centralized H∞ with off-diagonal blocks removed.
    Case3,
    /// Primary droop control only.
    DroopOnly,
}

impl Case {
    pub fn label(&self) -> &'static str {
        match self {
            Case::Case1 => "case1",
            Case::Case2 => "case2",
            Case::Case3 => "case3",
            Case::DroopOnly => "droop_only",
        }
    }

    pub fn compared() -> [Case; 3] {
        [Case::Case1, Case::Case2, Case::Case3]
    }
}

impl std::str::FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "case1" | "1" => Ok(Case::Case1),
            "case2" | "2" => Ok(Case::Case2),
            "case3" | "3" => Ok(Case::Case3),
            "droop_only" | "droop" => Ok(Case::DroopOnly),
            _ => Err(Error::validation("case", format!("unknown case `{s}`"))),
        }
    }
}

/// Regulation-like generated disturbance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegdSpec {
    #[serde(default)]
    pub seed: u64,
    /// Peak `ΔP_Lk` (pu).
    pub amplitude: f64,
    /// Peak `ΔV_w` (m/s).
    #[serde(default)]
    pub wind_amplitude: f64,
}

/// Where the disturbance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DisturbanceSource {
    Step(StepProfile),
    PiecewiseRamp(RampProfile),
    SampledSeries(SampledSeries),
    RegdLike(RegdSpec),
    /// CSV with header `t,dPL1,..,dVw` sampled at a uniform period.
    Csv { path: PathBuf },
}

impl DisturbanceSource {
    pub fn step(onset: f64, loads: Vec<f64>) -> Self {
        DisturbanceSource::Step(StepProfile { onset, loads, wind: 0.0 })
    }

    /// Resolves to a concrete profile for `n_grids` over `duration`.
    pub fn materialize(&self, n_grids: usize, duration: f64) -> Result<DisturbanceProfile> {
        let p = match self {
            DisturbanceSource::Step(s) => DisturbanceProfile::Step(s.clone()),
            DisturbanceSource::PiecewiseRamp(r) => DisturbanceProfile::PiecewiseRamp(r.clone()),
            DisturbanceSource::SampledSeries(s) => DisturbanceProfile::SampledSeries(s.clone()),
            DisturbanceSource::RegdLike(r) => {
                gen_regd_like(r.seed, duration, r.amplitude, n_grids, r.wind_amplitude)?
            }
            DisturbanceSource::Csv { path } => read_disturbance_csv(path, n_grids)?,
        };
        p.validate(n_grids)?;
        Ok(p)
    }
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    /// Plant parameter file, relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params_file: Option<PathBuf>,
    /// Inline plant parameters; defaults when neither is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<SystemParams>,
    #[serde(default = "default_case")]
    pub case: Case,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default)]
    pub plant_options: PlantOptions,
    #[serde(default)]
    pub gamma: GammaOptions,
    #[serde(default)]
    pub pi: PiGains,
    /// Applied to the simulated plant; controllers use the nominal one.
    #[serde(default)]
    pub uncertainty: UncertaintySpec,
    #[serde(default)]
    pub delay: DelayModel,
    #[serde(default)]
    pub comm_mask: CommMask,
    pub disturbance: DisturbanceSource,
    pub duration: f64,
    #[serde(default = "default_period")]
    pub sample_period: f64,
    /// Energy threshold for controller reduction; `None` keeps full order.
    #[serde(default = "default_threshold")]
    pub reduction_threshold: Option<f64>,
}

fn default_case() -> Case {
    Case::Case1
}

fn default_period() -> f64 {
    1e-3
}

fn default_threshold() -> Option<f64> {
    Some(0.999)
}

impl Scenario {
    /// Step test: every load rises by `amplitude` pu at 10 s.
    pub fn step_test(amplitude: f64, duration: f64) -> Self {
        let n = SystemParams::default().grids.len();
        Self::with_disturbance(DisturbanceSource::step(10.0, vec![amplitude; n]), duration)
    }

    /// Continuous test driven by regulation-like loads and wind.
    pub fn continuous_test(seed: u64, duration: f64) -> Self {
        Self::with_disturbance(
            DisturbanceSource::RegdLike(RegdSpec { seed, amplitude: 0.05, wind_amplitude: 0.5 }),
            duration,
        )
    }

    fn with_disturbance(disturbance: DisturbanceSource, duration: f64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            params_file: None,
            params: None,
            case: Case::Case1,
            weights: Weights::default(),
            plant_options: PlantOptions::default(),
            gamma: GammaOptions::default(),
            pi: PiGains::default(),
            uncertainty: UncertaintySpec::default(),
            delay: DelayModel::default(),
            comm_mask: CommMask::none(),
            disturbance,
            duration,
            sample_period: default_period(),
            reduction_threshold: default_threshold(),
        }
    }

    /// Reads a scenario and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        let mut s: Scenario = serde_json::from_str(&text)
            .map_err(|e| Error::Config { path: path.display().to_string(), reason: e.to_string() })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = &s.params_file {
            if p.is_relative() {
                s.params_file = Some(dir.join(p));
            }
        }
        if let DisturbanceSource::Csv { path: p } = &mut s.disturbance {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        s.validate()?;
        Ok(s)
    }

    /// Plant parameters from the file, the inline block or defaults.
    pub fn system_params(&self) -> Result<SystemParams> {
        let p = match (&self.params_file, &self.params) {
            (Some(_), Some(_)) => {
                return Err(Error::validation("params", "give either params or params_file, not both"));
            }
            (Some(path), None) => load_params(path)?,
            (None, Some(p)) => p.clone(),
            (None, None) => SystemParams::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::validation("schema", format!("expected {SCHEMA_VERSION}, got {}", self.schema)));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::validation("duration", "must be positive"));
        }
        if !(self.sample_period.is_finite() && self.sample_period > 0.0 && self.sample_period <= self.duration) {
            return Err(Error::validation("sample_period", "must be positive and at most the duration"));
        }
        self.delay.validate()?;
        let delayed = self.delay.td > 0.0 || self.delay.links.iter().any(|l| l.td > 0.0);
        if delayed && self.sample_period > 1e-3 + 1e-15 {
            return Err(Error::validation("sample_period", "must be at most 1 ms when delays are modelled"));
        }
        if let Some(t) = self.reduction_threshold {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::validation("reduction_threshold", "must lie in (0, 1]"));
            }
        }
        self.weights.validate()?;
        Ok(())
    }
}

/// Reads a plant parameter file.
pub fn load_params(path: &Path) -> Result<SystemParams> {
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let p: SystemParams = serde_json::from_str(&text)
        .map_err(|e| Error::Config { path: path.display().to_string(), reason: e.to_string() })?;
    p.validate()?;
    Ok(p)
}
