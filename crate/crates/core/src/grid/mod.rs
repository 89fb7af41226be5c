//! Small-signal model of AC grids linked by a hybrid MTDC network.

mod ac;
mod assemble;
mod dc;
mod lcc;
mod linrow;
mod owf;
pub mod params;
mod perturb;
mod sg;
mod vsc;

pub use ac::build_ac_network;
pub use assemble::{assemble_grid, r_names, y_names, CompositePlant, GridModel};
pub use dc::{build_dc_network, bus_shunt_seconds};
pub use lcc::build_lcc;
pub use owf::build_wfvsc;
pub use params::*;
pub use perturb::{perturb, perturb_params, UncertaintyGroup, UncertaintySpec};
pub use sg::{build_sg, sg_operating_point, SgOperatingPoint};
pub use vsc::build_vsc;
