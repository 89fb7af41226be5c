//! Line-commutated converter with power and DC-current control loops.

use super::linrow::Builder;
use super::params::{ConverterParams, LccParams, SystemBase};
use crate::error::Error;
use crate::lti::StateSpace;
use crate::Result;

pub const LCC_STATES: [&str; 9] = ["dIc_d", "dIc_q", "dVc_d", "dVc_q", "dIdco", "dVdc", "dm", "dtheta", "dn"];
pub const LCC_INPUTS: [&str; 4] = ["dP_ref", "dEc_d", "dEc_q", "dIdc"];
pub const LCC_OUTPUTS: [&str; 4] = ["dIc_d", "dIc_q", "dP", "dVdc"];

/// Builds the LCC model.
///
/// `P` is the power delivered to the AC grid (negative in rectifier
/// operation), `Idco` the converter DC current flowing into the terminal
/// capacitor and `dIdc` the current leaving the terminal into the cables.
/// The outer PI sets the DC current order from the power error, the inner
/// PI sets the firing angle, which acts through a first-order lag.
pub fn build_lcc(conv: &ConverterParams, base: &SystemBase, c_shunt_s: f64) -> Result<StateSpace> {
    let ConverterParams::Lcc(p) = conv else {
        return Err(Error::validation("converter.kind", format!("expected lcc, got {}", conv.kind())));
    };
    build_lcc_inner(p, base, c_shunt_s)
}

fn build_lcc_inner(p: &LccParams, base: &SystemBase, c_shunt_s: f64) -> Result<StateSpace> {
    p.validate()?;
    let wb = base.omega_b();
    let c_dc = base.dc_cap_seconds(p.c_uf) + c_shunt_s;
    let mut m = Builder::new(9, 4);
    let [ic_d, ic_q, vc_d, vc_q, idco, vdc, mi, theta, n] = std::array::from_fn(|i| m.x(i));
    let [pref, ec_d, ec_q, idc] = std::array::from_fn(|i| m.u(i));

    let pw = -idco.clone() + p.p0 * vdc.clone();
    let e_p = pref - pw.clone();
    let i_ord = -(p.power_kp * e_p.clone() + n);
    let e_i = i_ord - idco.clone();
    let alpha_cmd = -(p.current_kp * e_i.clone() + mi);
    let vd = p.k_v * vc_q.clone() - p.k_alpha * theta.clone() - p.r_c * idco.clone();

    m.deriv(0, (-ic_d.clone() - p.k_q * idco.clone() + 2.0 * p.c_f * vc_q.clone()) * (1.0 / p.tau_ac));
    m.deriv(1, (-ic_q.clone() + pw.clone()) * (1.0 / p.tau_ac));
    m.deriv(2, (-vc_d + ec_d) * (1.0 / p.tau_f));
    m.deriv(3, (-vc_q + ec_q) * (1.0 / p.tau_f));
    m.deriv(4, (vd - vdc.clone()) * (wb / p.l_sm));
    m.deriv(5, (idco - idc) * (1.0 / c_dc));
    m.deriv(6, p.current_ki * e_i);
    m.deriv(7, (alpha_cmd - theta) * (1.0 / p.tau_alpha));
    m.deriv(8, p.power_ki * e_p);

    m.output(ic_d);
    m.output(ic_q);
    m.output(pw);
    m.output(vdc);
    m.finish(&LCC_INPUTS, &LCC_STATES, &LCC_OUTPUTS)
}
