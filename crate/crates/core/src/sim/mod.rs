//! Scenarios, disturbance profiles, closed-loop simulation and case
//! comparison.

mod cases;
mod compare;
pub mod io;
mod profile;
mod scenario;
mod simulate;

pub use cases::{build_case, build_case_labelled, reduce_controllers, CaseControllers, DesignOptions};
pub use compare::{
    compare_cases, run_cases, run_weighting_study, table, write_weighting_csv, CaseRow, ComparisonTable, FilterKind,
    WeightingPoint,
};
pub use profile::{
    gen_regd_like, regd_series, DisturbanceProfile, RampProfile, SampledSeries, StepProfile, REGD_PERIOD, REGD_TAU,
};
pub use scenario::{load_params, Case, DisturbanceSource, RegdSpec, Scenario, SCHEMA_VERSION};
pub use simulate::{peak, rms, simulate, simulate_loop, simulate_with, Metrics, SimulationResult};
