//! Regional AC network seen from the PCC: coupling transformer,
//! aggregate dynamic load and the PLL that measures grid frequency.

use super::linrow::Builder;
use super::params::AcParams;
use crate::lti::StateSpace;
use crate::Result;

pub const AC_STATES: [&str; 3] = ["dIL_d", "dIL_q", "dx_pll"];
pub const AC_INPUTS: [&str; 5] = ["dVt_d", "dVt_q", "dIc_d", "dIc_q", "dPL"];
pub const AC_OUTPUTS: [&str; 7] = ["dIs_d", "dIs_q", "dEc_d", "dEc_q", "dw_pll", "df", "dVmag"];

/// Builds the network model.
///
/// The generator supplies the load current minus the converter injection;
/// the PCC voltage `Ec` follows from the terminal voltage and the drop on
/// the transformer. The PLL is a PI loop on the quadrature voltage.
/// Outputs `df` in Hz, everything else in pu.
pub fn build_ac_network(p: &AcParams, f_hz: f64) -> Result<StateSpace> {
    p.validate()?;
    let mut m = Builder::new(3, 5);
    let [il_d, il_q, xpll] = std::array::from_fn(|i| m.x(i));
    let [vt_d, vt_q, ic_d, ic_q, pl] = std::array::from_fn(|i| m.u(i));

    let is_d = il_d.clone() - ic_d;
    let is_q = il_q.clone() - ic_q;
    let ec_q = vt_q - p.xg * is_d.clone();
    let ec_d = vt_d + p.xg * is_q.clone();
    let err = -ec_d.clone();
    let wpll = p.pll_kp * err.clone() + xpll;

    m.deriv(0, (-il_d + p.k_qv * ec_q.clone()) * (1.0 / p.tau_load));
    m.deriv(1, (-il_q + pl + p.k_pv * ec_q.clone() + p.load_damping * wpll.clone()) * (1.0 / p.tau_load));
    m.deriv(2, p.pll_ki * err);

    m.output(is_d);
    m.output(is_q);
    m.output(ec_d);
    m.output(ec_q.clone());
    m.output(wpll.clone());
    m.output(f_hz * wpll);
    m.output(ec_q);
    m.finish(&AC_INPUTS, &AC_STATES, &AC_OUTPUTS)
}
