//! PMSG offshore wind farm and its wind-farm VSC, seen from the DC bus.

use super::linrow::Builder;
use super::params::{OwfParams, SystemBase};
use crate::lti::StateSpace;
use crate::Result;

pub const OWF_STATES: [&str; 8] = ["dwe", "dthetae", "dIm_d", "dIm_q", "dVdc", "dm_owf", "dn_d", "dn_q"];
pub const OWF_INPUTS: [&str; 2] = ["dVw", "dIdc"];
pub const OWF_OUTPUTS: [&str; 2] = ["dVdc", "dPw"];

/// Builds the wind farm model.
///
/// Aerodynamic torque is linearized at the operating wind speed
/// (power ∝ V_w³, optimal tip-speed ratio). A speed PI sets the q-axis
/// machine current; `dthetae` is its integral state. The converter passes
/// the generated power to the DC terminal through a first-order lag.
pub fn build_wfvsc(p: &OwfParams, base: &SystemBase, c_shunt_s: f64) -> Result<StateSpace> {
    p.validate()?;
    let wb = base.omega_b();
    let c_dc = base.dc_cap_seconds(p.c_uf) + c_shunt_s;
    let k_wind = 3.0 * p.p_w0 / p.v_w0;
    let k_speed = p.p_w0;
    let kp_i = p.current_alpha * p.ls / wb;
    let ki_i = p.current_alpha * p.rs;
    let tl = p.ls / wb;

    let mut m = Builder::new(8, 2);
    let [w, theta, im_d, im_q, vdc, mw, n_d, n_q] = std::array::from_fn(|i| m.x(i));
    let [vw, idc] = std::array::from_fn(|i| m.u(i));

    let iref_q = p.speed_kp * w.clone() + p.speed_ki * theta;
    let ed = -im_d.clone();
    let eq = iref_q - im_q.clone();
    let p_gen = p.phi_f * im_q.clone() + p.p_w0 * w.clone();

    m.deriv(0, (k_wind * vw - k_speed * w.clone() - p.phi_f * im_q.clone()) * (1.0 / (2.0 * p.h)));
    m.deriv(1, w);
    m.deriv(2, (kp_i * ed.clone() + n_d - p.rs * im_d) * (1.0 / tl));
    m.deriv(3, (kp_i * eq.clone() + n_q - p.rs * im_q) * (1.0 / tl));
    m.deriv(4, (mw.clone() - p.p_w0 * vdc.clone() - idc) * (1.0 / c_dc));
    m.deriv(5, (p_gen - mw.clone()) * (1.0 / p.tau_w));
    m.deriv(6, ki_i * ed);
    m.deriv(7, ki_i * eq);

    m.output(vdc);
    m.output(mw);
    m.finish(&OWF_INPUTS, &OWF_STATES, &OWF_OUTPUTS)
}
