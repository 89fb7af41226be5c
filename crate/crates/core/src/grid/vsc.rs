//! Grid-side VSC with cascaded PI control and P–Vdc droop.

use super::linrow::Builder;
use super::params::{ConverterParams, SystemBase, VscParams};
use crate::error::Error;
use crate::lti::StateSpace;
use crate::Result;

pub const VSC_STATES: [&str; 7] = ["dIc_d", "dIc_q", "dVdc", "dn_d", "dn_q", "dm_d", "dm_q"];
pub const VSC_INPUTS: [&str; 5] = ["dP_ref", "dVdc_ref", "dVmag_ref", "dEc_q", "dIdc"];
pub const VSC_OUTPUTS: [&str; 4] = ["dIc_d", "dIc_q", "dP", "dVdc"];

/// Builds the VSC model.
///
/// `Ic` is injected into the AC grid and `P` is the power delivered to the
/// grid; `dIdc` is the current leaving the DC terminal into the cable
/// network. `c_shunt_s` adds cable capacitance (as a time constant in
/// seconds) to the terminal capacitor.
pub fn build_vsc(conv: &ConverterParams, base: &SystemBase, c_shunt_s: f64) -> Result<StateSpace> {
    let ConverterParams::Gsvsc(p) = conv else {
        return Err(Error::validation("converter.kind", format!("expected gsvsc, got {}", conv.kind())));
    };
    build_vsc_inner(p, base, c_shunt_s)
}

fn build_vsc_inner(p: &VscParams, base: &SystemBase, c_shunt_s: f64) -> Result<StateSpace> {
    p.validate()?;
    let wb = base.omega_b();
    let c_dc = base.dc_cap_seconds(p.c_uf) + c_shunt_s;
    let l_design = p.inner_design_lf.unwrap_or(p.lf);
    let k_pi = p.inner_alpha * l_design / wb;
    let k_ii = p.inner_alpha * p.rf;
    let tl = p.lf / wb;

    let mut m = Builder::new(7, 5);
    let [ic_d, ic_q, vdc, n_d, n_q, m_d, m_q] = std::array::from_fn(|i| m.x(i));
    let [pref, vdcref, vmagref, ec_q, idc] = std::array::from_fn(|i| m.u(i));

    let pw = ic_q.clone() + p.p0 * ec_q.clone();
    let e_p = pref + p.r_droop * (vdc.clone() - vdcref) - pw.clone();
    let e_v = vmagref - ec_q;
    let iref_q = p.outer_kp * e_p.clone() + n_q;
    let iref_d = p.outer_kp * e_v.clone() + n_d;
    let ed = iref_d - ic_d.clone();
    let eq = iref_q - ic_q.clone();

    m.deriv(0, (k_pi * ed.clone() + m_d - p.rf * ic_d.clone()) * (1.0 / tl));
    m.deriv(1, (k_pi * eq.clone() + m_q - p.rf * ic_q.clone()) * (1.0 / tl));
    m.deriv(2, (-pw.clone() + p.p0 * vdc.clone() - idc) * (1.0 / c_dc));
    m.deriv(3, p.outer_ki * e_v);
    m.deriv(4, p.outer_ki * e_p);
    m.deriv(5, k_ii * ed);
    m.deriv(6, k_ii * eq);

    m.output(ic_d);
    m.output(ic_q);
    m.output(pw);
    m.output(vdc);
    m.finish(&VSC_INPUTS, &VSC_STATES, &VSC_OUTPUTS)
}
