//! Per-grid assembly and the composite MTDC plant.

use super::ac::build_ac_network;
use super::dc::{build_dc_network, bus_shunt_seconds};
use super::lcc::build_lcc;
use super::owf::build_wfvsc;
use super::params::{ConverterParams, GridParams, SystemBase, SystemParams};
use super::sg::build_sg;
use super::vsc::build_vsc;
use crate::error::{Error, Result};
use crate::lti::{Connector, StateSpace};
use crate::numerics::Matrix;

/// Names of the six measured outputs of grid `k` (1-based), in order
/// `[ΔPg, Δωr, Δf, ΔVmag, ΔVdc, ΔP]`.
pub fn y_names(k: usize) -> Vec<String> {
    ["dPg", "dwr", "df", "dVmag", "dVdc", "dP"].iter().map(|s| format!("{s}{k}")).collect()
}

/// Control inputs of grid `k` (1-based).
pub fn r_names(k: usize, conv: &ConverterParams) -> Vec<String> {
    let mut v = vec![format!("dPg_ref{k}"), format!("dP_ref{k}")];
    if matches!(conv, ConverterParams::Gsvsc(_)) {
        v.push(format!("dVdc_ref{k}"));
    }
    v
}

/// One assembled AC grid. Inputs are `r_k`, then `dPL{k}`, then the DC
/// port current `dIdc{k}`; outputs are `Y_k`.
#[derive(Debug, Clone)]
pub struct GridModel {
    pub k: usize,
    pub ss: StateSpace,
    pub n_r: usize,
}

impl GridModel {
    pub fn a(&self) -> &Matrix {
        &self.ss.a
    }

    pub fn b_r(&self) -> Matrix {
        self.ss.b.columns(0, self.n_r).into_owned()
    }

    pub fn b_w(&self) -> Matrix {
        self.ss.b.columns(self.n_r, 1).into_owned()
    }

    /// Coupling to the DC port current.
    pub fn e_dc(&self) -> Matrix {
        self.ss.b.columns(self.n_r + 1, 1).into_owned()
    }

    pub fn c(&self) -> &Matrix {
        &self.ss.c
    }
}

/// Wires generator, network and converter of grid `k` (1-based).
///
/// Exciter and PCC-voltage references are held at zero.
pub fn assemble_grid(k: usize, p: &GridParams, base: &SystemBase, c_shunt_s: f64) -> Result<GridModel> {
    let sg = build_sg(&p.sg, base.omega_b())?.prefixed(&format!("g{k}.sg"));
    let ac = build_ac_network(&p.ac, base.f_hz)?.prefixed(&format!("g{k}.ac"));
    let is_vsc = matches!(p.converter, ConverterParams::Gsvsc(_));
    let conv = if is_vsc {
        build_vsc(&p.converter, base, c_shunt_s)?
    } else {
        build_lcc(&p.converter, base, c_shunt_s)?
    }
    .prefixed(&format!("g{k}.conv"));

    let n = |blk: &str, sig: &str| format!("g{k}.{blk}.{sig}");
    let mut net = Connector::new();
    net.add(sg).add(ac).add(conv);
    for sig in ["dIs_d", "dIs_q"] {
        net.link(&n("sg", sig), &n("ac", sig), 1.0);
    }
    net.link(&n("sg", "dw_pll"), &n("ac", "dw_pll"), 1.0);
    for sig in ["dVt_d", "dVt_q"] {
        net.link(&n("ac", sig), &n("sg", sig), 1.0);
    }
    for sig in ["dIc_d", "dIc_q"] {
        net.link(&n("ac", sig), &n("conv", sig), 1.0);
    }
    net.link(&n("conv", "dEc_q"), &n("ac", "dEc_q"), 1.0);
    if !is_vsc {
        net.link(&n("conv", "dEc_d"), &n("ac", "dEc_d"), 1.0);
    }

    let r = r_names(k, &p.converter);
    net.input(&r[0], &[(&n("sg", "dPg_ref"), 1.0)]);
    net.input(&r[1], &[(&n("conv", "dP_ref"), 1.0)]);
    if is_vsc {
        net.input(&r[2], &[(&n("conv", "dVdc_ref"), 1.0)]);
    }
    net.input(&format!("dPL{k}"), &[(&n("ac", "dPL"), 1.0)]);
    net.input(&format!("dIdc{k}"), &[(&n("conv", "dIdc"), 1.0)]);

    let y = y_names(k);
    net.output(&y[0], &[(&n("sg", "dPg"), 1.0)]);
    net.output(&y[1], &[(&n("sg", "dwr"), 1.0)]);
    net.output(&y[2], &[(&n("ac", "df"), 1.0)]);
    net.output(&y[3], &[(&n("ac", "dVmag"), 1.0)]);
    net.output(&y[4], &[(&n("conv", "dVdc"), 1.0)]);
    net.output(&y[5], &[(&n("conv", "dP"), 1.0)]);
    let ss = net.build()?;
    Ok(GridModel { k, ss, n_r: r.len() })
}

/// The interconnected plant: all grids, the wind farm and the DC network.
///
/// Inputs are `r_1, …, r_K`, then `dPL1..K` and `dVw`. Outputs are
/// `Y_1, …, Y_K`, then the wind-farm bus voltage, the wind-farm power and
/// the mean DC voltage deviation over all buses.
#[derive(Debug, Clone)]
pub struct CompositePlant {
    pub ss: StateSpace,
    pub params: SystemParams,
    /// Input indices of `r_k` per grid.
    pub r_idx: Vec<Vec<usize>>,
    /// Input indices of the exogenous disturbances.
    pub w_idx: Vec<usize>,
    /// Output indices of `Y_k` per grid.
    pub y_idx: Vec<Vec<usize>>,
    /// State index range of each grid, then the wind farm, then the cables.
    pub blocks: Vec<(String, std::ops::Range<usize>)>,
}

impl CompositePlant {
    pub fn build(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let base = &params.base;
        let kk = params.grids.len();
        let shunt = bus_shunt_seconds(&params.dc, base);
        let grids = params
            .grids
            .iter()
            .enumerate()
            .map(|(i, g)| assemble_grid(i + 1, g, base, shunt[i]))
            .collect::<Result<Vec<_>>>()?;
        let owf = build_wfvsc(&params.owf, base, shunt[kk])?.prefixed("owf");
        let dc = build_dc_network(&params.dc, base)?.prefixed("dc");

        let mut blocks = Vec::new();
        let mut off = 0;
        let mut net = Connector::new();
        for g in &grids {
            blocks.push((format!("grid{}", g.k), off..off + g.ss.n_states()));
            off += g.ss.n_states();
            net.add(g.ss.clone());
        }
        blocks.push(("owf".to_string(), off..off + owf.n_states()));
        off += owf.n_states();
        blocks.push(("dc".to_string(), off..off + dc.n_states()));
        net.add(owf).add(dc);

        for k in 1..=kk {
            net.link(&format!("dc.dV{k}"), &format!("dVdc{k}"), 1.0);
            net.link(&format!("dIdc{k}"), &format!("dc.dIdc{k}"), 1.0);
        }
        let wb = kk + 1;
        net.link(&format!("dc.dV{wb}"), "owf.dVdc", 1.0);
        net.link("owf.dIdc", &format!("dc.dIdc{wb}"), 1.0);

        let mut r_idx = Vec::new();
        let mut col = 0;
        for (i, g) in params.grids.iter().enumerate() {
            let names = r_names(i + 1, &g.converter);
            for r in &names {
                net.input(r, &[(r.as_str(), 1.0)]);
            }
            r_idx.push((col..col + names.len()).collect());
            col += names.len();
        }
        for k in 1..=kk {
            let w = format!("dPL{k}");
            net.input(&w, &[(w.as_str(), 1.0)]);
        }
        net.input("dVw", &[("owf.dVw", 1.0)]);
        let w_idx = (col..col + kk + 1).collect();

        let mut y_idx = Vec::new();
        let mut row = 0;
        for k in 1..=kk {
            for y in y_names(k) {
                net.output(&y, &[(y.as_str(), 1.0)]);
            }
            y_idx.push((row..row + 6).collect());
            row += 6;
        }
        net.output(&format!("dVdc{wb}"), &[("owf.dVdc", 1.0)]);
        net.output("dPw", &[("owf.dPw", 1.0)]);
        let avg: Vec<String> =
            (1..=kk).map(|k| format!("dVdc{k}")).chain(std::iter::once("owf.dVdc".to_string())).collect();
        let wavg = 1.0 / (kk + 1) as f64;
        let terms: Vec<(&str, f64)> = avg.iter().map(|s| (s.as_str(), wavg)).collect();
        net.output("dVdc_avg", &terms);

        let ss = net.build()?;
        Ok(Self { ss, params: params.clone(), r_idx, w_idx, y_idx, blocks })
    }

    pub fn n_grids(&self) -> usize {
        self.r_idx.len()
    }

    pub fn n_states(&self) -> usize {
        self.ss.n_states()
    }

    /// `B_rEk` for grid index `k` (0-based).
    pub fn b_r(&self, k: usize) -> Matrix {
        self.ss.b.select_columns(&self.r_idx[k])
    }

    /// `B_rE` over the stacked `r`.
    pub fn b_r_all(&self) -> Matrix {
        let idx: Vec<usize> = self.r_idx.iter().flatten().copied().collect();
        self.ss.b.select_columns(&idx)
    }

    /// Disturbance input matrix `B_wE` for `[dPL1..K, dVw]`.
    pub fn b_w(&self) -> Matrix {
        self.ss.b.select_columns(&self.w_idx)
    }

    /// Input indices of `[w, r_j (j ≠ k)]`, the disturbances seen by
    /// controller `k`.
    pub fn dr_idx(&self, k: usize) -> Vec<usize> {
        let mut v = self.w_idx.clone();
        for (j, r) in self.r_idx.iter().enumerate() {
            if j != k {
                v.extend(r.iter().copied());
            }
        }
        v
    }

    /// `B_drk = [B_wE, B_rEj (j ≠ k)]`.
    pub fn b_dr(&self, k: usize) -> Matrix {
        self.ss.b.select_columns(&self.dr_idx(k))
    }

    /// Output indices of `Y_Tk`: the local `Y_k`, then `Δf_j, ΔVdc_j` of
    /// every other grid.
    pub fn t_idx(&self, k: usize) -> Vec<usize> {
        let mut v = self.y_idx[k].clone();
        for (j, y) in self.y_idx.iter().enumerate() {
            if j != k {
                v.push(y[2]);
                v.push(y[4]);
            }
        }
        v
    }

    /// Measurement selector `C_Tk`.
    pub fn c_t(&self, k: usize) -> Matrix {
        self.ss.c.select_rows(&self.t_idx(k))
    }

    pub fn t_names(&self, k: usize) -> Vec<String> {
        self.t_idx(k).iter().map(|&i| self.ss.outputs[i].clone()).collect()
    }

    pub fn r_names(&self, k: usize) -> Vec<String> {
        self.r_idx[k].iter().map(|&i| self.ss.inputs[i].clone()).collect()
    }

    pub fn output(&self, name: &str) -> Result<usize> {
        self.ss.output_index(name).ok_or_else(|| Error::Wiring(vec![name.to_string()]))
    }

    pub fn input(&self, name: &str) -> Result<usize> {
        self.ss.input_index(name).ok_or_else(|| Error::Wiring(vec![name.to_string()]))
    }
}
