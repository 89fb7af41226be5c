//! Synchronous generator: sub-transient machine, governor with reheat
//! turbine and first-order exciter.
//!
//! The rotor angle is measured against the PLL frame of the grid, so the
//! model has no absolute-angle integrator. Network quantities use the
//! PLL frame with the q-axis in phase with the voltage; machine
//! quantities use the rotor frame.

use num_complex::Complex64;

use super::linrow::Builder;
use super::params::SgParams;
use crate::lti::StateSpace;
use crate::Result;

pub const SG_STATES: [&str; 11] =
    ["dEq_t", "dEd_t", "dpsi1d", "dpsi2q", "ddelta", "dwr", "dxgov1", "dxgov2", "dxtur1", "dxtur2", "dVfd"];
pub const SG_INPUTS: [&str; 5] = ["dPg_ref", "dEt_ref", "dIs_d", "dIs_q", "dw_pll"];
pub const SG_OUTPUTS: [&str; 5] = ["dVt_d", "dVt_q", "dPg", "dwr", "dEt"];

/// Steady state of the machine with its terminal voltage at 1∠0.
#[derive(Debug, Clone, Copy)]
pub struct SgOperatingPoint {
    pub delta0: f64,
    pub iq_m: f64,
    pub id_m: f64,
    pub eq_st: f64,
    pub ed_st: f64,
}

pub fn sg_operating_point(p: &SgParams) -> SgOperatingPoint {
    let v = Complex64::new(1.0, 0.0);
    // current phasor Iq − jId with Iq = P, Id = Q at unit voltage
    let i = Complex64::new(p.p0, -p.q0);
    let e_q = v + Complex64::new(p.rs, p.xq) * i;
    let delta0 = e_q.arg();
    let (s, c) = delta0.sin_cos();
    let (iq, id) = (p.p0, p.q0);
    let iq_m = c * iq - s * id;
    let id_m = s * iq + c * id;
    let vq_m = c;
    let vd_m = s;
    SgOperatingPoint {
        delta0,
        iq_m,
        id_m,
        eq_st: vq_m + p.rs * iq_m + p.xd_st * id_m,
        ed_st: vd_m + p.rs * id_m - p.xd_st * iq_m,
    }
}

/// Builds the 11-state generator model.
///
/// Inputs `[dPg_ref, dEt_ref, dIs_d, dIs_q, dw_pll]`, outputs
/// `[dVt_d, dVt_q, dPg, dwr, dEt]`; stator currents and terminal voltage in
/// the PLL frame, `dw_pll` the PLL frequency deviation (pu).
pub fn build_sg(p: &SgParams, omega_b: f64) -> Result<StateSpace> {
    p.validate()?;
    let op = sg_operating_point(p);
    let (s, c) = op.delta0.sin_cos();
    let mut m = Builder::new(11, 5);
    let [eq, ed, psi1d, psi2q, delta, w, g1, g2, t1, t2, vfd] = std::array::from_fn(|i| m.x(i));
    let [pref, etref, isd, isq, wpll] = std::array::from_fn(|i| m.u(i));

    // machine-frame current deviations
    let iq = c * isq.clone() - s * isd.clone() - op.id_m * delta.clone();
    let id = s * isq.clone() + c * isd.clone() + op.iq_m * delta.clone();

    let dd = p.xd_t - p.ls;
    let dq = p.xq_t - p.ls;
    let (a_d, b_d) = ((p.xd_st - p.ls) / dd, (p.xd_t - p.xd_st) / dd);
    let (a_q, b_q) = ((p.xq_st - p.ls) / dq, (p.xq_t - p.xq_st) / dq);
    let kd = (p.xd_t - p.xd_st) / (dd * dd);
    let kq = (p.xq_t - p.xq_st) / (dq * dq);
    let eq_st = a_d * eq.clone() + b_d * psi1d.clone();
    let ed_st = a_q * ed.clone() - b_q * psi2q.clone();

    m.deriv(
        0,
        (-eq.clone()
            - (p.xd - p.xd_t) * (id.clone() - kd * (psi1d.clone() + dd * id.clone() - eq.clone()))
            + vfd.clone())
            * (1.0 / p.td0_t),
    );
    m.deriv(
        1,
        (-ed.clone() + (p.xq - p.xq_t) * (iq.clone() - kq * (psi2q.clone() + dq * iq.clone() + ed.clone())))
            * (1.0 / p.tq0_t),
    );
    m.deriv(2, (-psi1d.clone() + eq.clone() - dd * id.clone()) * (1.0 / p.td0_st));
    m.deriv(3, (-psi2q.clone() - ed.clone() - dq * iq.clone()) * (1.0 / p.tq0_st));
    m.deriv(4, (w.clone() - wpll) * omega_b);

    let te = op.eq_st * iq.clone() + op.iq_m * eq_st.clone() + op.ed_st * id.clone() + op.id_m * ed_st.clone();
    let pm = p.fhp * t1.clone() + (1.0 - p.fhp) * t2.clone();
    m.deriv(5, (pm - te - p.damping * w.clone()) * (1.0 / (2.0 * p.h)));
    m.deriv(6, (-g1.clone() + pref - (1.0 / p.droop_r) * w.clone()) * (1.0 / p.tg));
    m.deriv(7, (g1 - g2.clone()) * (1.0 / p.tsm));
    m.deriv(8, (g2 - t1.clone()) * (1.0 / p.tch));
    m.deriv(9, (t1 - t2) * (1.0 / p.trh));

    // stator voltage in the rotor frame, rotated into the PLL frame
    let vm_q = eq_st - p.rs * iq.clone() - p.xd_st * id.clone();
    let vm_d = ed_st - p.rs * id + p.xd_st * iq;
    let vt_q = c * vm_q.clone() + s * vm_d.clone();
    let vt_d = -s * vm_q + c * vm_d - delta;
    let et = vt_q.clone();
    m.deriv(10, (-vfd + p.kc * (etref - et.clone())) * (1.0 / p.te));

    let pg = isq + p.p0 * vt_q.clone() + p.q0 * vt_d.clone();
    m.output(vt_d);
    m.output(vt_q);
    m.output(pg);
    m.output(w);
    m.output(et);
    m.finish(&SG_INPUTS, &SG_STATES, &SG_OUTPUTS)
}
