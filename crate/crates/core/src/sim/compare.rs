//! Side-by-side runs of the strategies and the weighting-function study.

use serde::{Deserialize, Serialize};

use super::cases::{build_case_labelled, CaseControllers, DesignOptions};
use super::io::{fmt_num, write_table};
use super::scenario::{Case, Scenario};
use super::simulate::{simulate_with, Metrics, SimulationResult};
use crate::error::Result;
use crate::grid::CompositePlant;
use crate::par;
use crate::synthesis::{WeightingFunction, Weights};

/// Metrics of one strategy in a comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CaseRow {
    pub case: Case,
    pub metrics: Metrics,
    pub unstable: bool,
    /// Controller orders used in closed loop.
    pub orders: Vec<usize>,
}

/// Metrics per strategy plus Case 1's relative improvement.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<CaseRow>,
}

impl ComparisonTable {
    pub fn row(&self, case: Case) -> Option<&CaseRow> {
        self.rows.iter().find(|r| r.case == case)
    }

    /// `(other − reference) / other` in percent for a metric.
    pub fn reduction(&self, reference: Case, other: Case, metric: impl Fn(&Metrics) -> f64) -> Option<f64> {
        let a = metric(&self.row(reference)?.metrics);
        let b = metric(&self.row(other)?.metrics);
        (b != 0.0).then(|| 100.0 * (b - a) / b)
    }

    /// `case, sum_f_max, sum_f_rms, vdc_max, vdc_rms, f_max_k.., f_rms_k.., orders, unstable`.
    pub fn to_rows(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let n = self.rows.first().map_or(0, |r| r.metrics.f_max.len());
        let mut header: Vec<String> =
            ["case", "sum_f_max_hz", "sum_f_rms_hz", "vdc_max_pu", "vdc_rms_pu"].iter().map(|s| s.to_string()).collect();
        header.extend((1..=n).map(|k| format!("f{k}_max_hz")));
        header.extend((1..=n).map(|k| format!("f{k}_rms_hz")));
        header.push("orders".into());
        header.push("unstable".into());
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let m = &r.metrics;
                let mut v = vec![
                    r.case.label().to_string(),
                    fmt_num(m.sum_f_max),
                    fmt_num(m.sum_f_rms),
                    fmt_num(m.vdc_max),
                    fmt_num(m.vdc_rms),
                ];
                v.extend(m.f_max.iter().map(|x| fmt_num(*x)));
                v.extend(m.f_rms.iter().map(|x| fmt_num(*x)));
                v.push(r.orders.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" "));
                v.push(r.unstable.to_string());
                v
            })
            .collect();
        (header, rows)
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let (h, r) = self.to_rows();
        write_table(path, &h, &r)
    }
}

/// Builds every case's controllers and simulates the scenario with each.
pub fn run_cases(
    scenario: &Scenario,
    nominal: &CompositePlant,
    cases: &[Case],
) -> Result<Vec<(CaseControllers, SimulationResult)>> {
    scenario.validate()?;
    let opts = DesignOptions::from(scenario);
    par::map(cases, |&c| {
        let ctrl = build_case_labelled(nominal, c, &opts)?;
        let res = simulate_with(scenario, nominal, &ctrl)?;
        Ok((ctrl, res))
    })
    .into_iter()
    .collect()
}

/// Runs Cases 1–3 on the same plant and disturbance.
pub fn compare_cases(scenario: &Scenario) -> Result<ComparisonTable> {
    let nominal = CompositePlant::build(&scenario.system_params()?)?;
    let runs = run_cases(scenario, &nominal, &Case::compared())?;
    Ok(table(&runs))
}

pub fn table(runs: &[(CaseControllers, SimulationResult)]) -> ComparisonTable {
    ComparisonTable {
        rows: runs
            .iter()
            .map(|(c, r)| CaseRow {
                case: c.case,
                metrics: r.metrics.clone(),
                unstable: r.unstable(),
                orders: c.controllers.iter().map(|k| k.order()).collect(),
            })
            .collect(),
    }
}

/// Filter family swept in the weighting study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    LowPass,
    BandPass,
}

impl FilterKind {
    /// Weight with cutoff (low-pass) or bandwidth (band-pass) `value`.
    pub fn weight(&self, value: f64) -> WeightingFunction {
        match self {
            FilterKind::LowPass => WeightingFunction::LowPass { cutoff: value, gain: 1.0 },
            FilterKind::BandPass => WeightingFunction::BandPass { bandwidth: value, center: 1.0, gain: 1.0 },
        }
    }
}

/// One point of the weighting study; a failed synthesis leaves the
/// metrics empty and records the error.
#[derive(Debug, Clone, Serialize)]
pub struct WeightingPoint {
    pub kind: FilterKind,
    pub value: f64,
    pub case1: Option<Metrics>,
    pub case3: Option<Metrics>,
    pub error: Option<String>,
}

impl WeightingPoint {
    pub fn succeeded(&self) -> bool {
        self.case1.is_some() && self.case3.is_some()
    }
}

/// Re-synthesizes Cases 1 and 3 with every weight set to the filter at
/// each value and runs the scenario. Case 3 is skipped at points where
/// Case 1 fails.
pub fn run_weighting_study(scenario: &Scenario, kind: FilterKind, values: &[f64]) -> Result<Vec<WeightingPoint>> {
    scenario.validate()?;
    let nominal = CompositePlant::build(&scenario.system_params()?)?;
    let points = par::map(values, |&v| {
        let mut s = scenario.clone();
        s.weights = Weights::uniform(kind.weight(v));
        let opts = DesignOptions::from(&s);
        let run = |case: Case| -> Result<Metrics> {
            let ctrl = build_case_labelled(&nominal, case, &opts)?;
            Ok(simulate_with(&s, &nominal, &ctrl)?.metrics)
        };
        match run(Case::Case1).and_then(|m1| Ok((m1, run(Case::Case3)?))) {
            Ok((m1, m3)) => WeightingPoint { kind, value: v, case1: Some(m1), case3: Some(m3), error: None },
            Err(e) => {
                log::warn!("weighting point {v}: {e}");
                WeightingPoint { kind, value: v, case1: None, case3: None, error: Some(e.to_string()) }
            }
        }
    });
    Ok(points)
}

/// `kind, value, case1_sum_f_rms, case3_sum_f_rms, case1_vdc_rms, case3_vdc_rms, error`.
pub fn write_weighting_csv(path: &std::path::Path, points: &[WeightingPoint]) -> Result<()> {
    let header: Vec<String> =
        ["kind", "value", "case1_sum_f_rms_hz", "case3_sum_f_rms_hz", "case1_vdc_rms_pu", "case3_vdc_rms_pu", "error"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    let opt = |m: &Option<Metrics>, f: fn(&Metrics) -> f64| m.as_ref().map(|m| fmt_num(f(m))).unwrap_or_default();
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                match p.kind {
                    FilterKind::LowPass => "low_pass".into(),
                    FilterKind::BandPass => "band_pass".into(),
                },
                fmt_num(p.value),
                opt(&p.case1, |m| m.sum_f_rms),
                opt(&p.case3, |m| m.sum_f_rms),
                opt(&p.case1, |m| m.vdc_rms),
                opt(&p.case3, |m| m.vdc_rms),
                p.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_table(path, &header, &rows)
}
