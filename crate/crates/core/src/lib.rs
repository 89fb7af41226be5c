//! Small-signal modelling, decentralized H∞ frequency regulation and case
//! studies for AC grids linked by a hybrid multi-terminal DC network.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod lti;
pub mod numerics;
pub mod par;
pub mod reduction;
pub mod sim;
pub mod synthesis;

pub use error::{Error, Result};
