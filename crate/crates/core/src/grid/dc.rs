//! Π-section DC cable network with line-current states.

use super::linrow::Builder;
use super::params::{DcNetworkParams, SystemBase};
use crate::lti::StateSpace;
use crate::Result;

/// Builds the cable network.
///
/// Inputs are the bus voltage deviations `dV{i}`, outputs the net currents
/// `dIdc{i}` leaving each bus into the cables, states the line currents
/// `dIdc{from}{to}`.
pub fn build_dc_network(p: &DcNetworkParams, base: &SystemBase) -> Result<StateSpace> {
    p.validate()?;
    let z = base.z_dc();
    let nb = p.n_buses;
    let nl = p.lines.len();
    let mut m = Builder::new(nl, nb);
    for (i, l) in p.lines.iter().enumerate() {
        let r = p.r_ohm_km * l.length_km / z;
        let tl = p.l_mh_km * 1e-3 * l.length_km / z;
        m.deriv(i, (m.u(l.from - 1) - m.u(l.to - 1) - r * m.x(i)) * (1.0 / tl));
    }
    for b in 1..=nb {
        let mut net = m.zero();
        for (i, l) in p.lines.iter().enumerate() {
            if l.from == b {
                net = net + m.x(i);
            } else if l.to == b {
                net = net - m.x(i);
            }
        }
        m.output(net);
    }
    let inputs: Vec<String> = (1..=nb).map(|b| format!("dV{b}")).collect();
    let outputs: Vec<String> = (1..=nb).map(|b| format!("dIdc{b}")).collect();
    let states: Vec<String> = p.lines.iter().map(|l| format!("dIdc{}{}", l.from, l.to)).collect();
    m.finish(&inputs, &states, &outputs)
}

/// Half of every incident cable's capacitance, per bus, as a time constant.
pub fn bus_shunt_seconds(p: &DcNetworkParams, base: &SystemBase) -> Vec<f64> {
    let mut c = vec![0.0; p.n_buses];
    for l in &p.lines {
        let half = 0.5 * base.dc_cap_seconds(p.c_uf_km * l.length_km);
        c[l.from - 1] += half;
        c[l.to - 1] += half;
    }
    c
}
