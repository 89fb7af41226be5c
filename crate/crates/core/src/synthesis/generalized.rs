//! Generalized plant for one (or several) controllers.

use serde::{Deserialize, Serialize};

use super::weights::Weights;
use crate::error::{Error, Result};
use crate::grid::CompositePlant;
use crate::lti::{Connector, StateSpace};
use crate::numerics::{svd_singular_values, Matrix};

/// Knobs of the generalized-plant construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantOptions {
    /// Leak rate (1/s) of the `∫Δf`, `∫ΔV_dc` augmentation states.
    pub integrator_leak: f64,
    /// `ε` added to rank-deficient `D12ᵀD12` and `D21D21ᵀ`.
    pub regularization: f64,
    /// Gain on the `ΔV_dc`, `∫ΔV_dc` performance rows relative to the
    /// frequency rows.
    pub vdc_scale: f64,
}

impl Default for PlantOptions {
    fn default() -> Self {
        Self { integrator_leak: 0.1, regularization: 1e-2, vdc_scale: 1.0 }
    }
}

/// `ẋ = A1 x + B1 d + B2 u`, `z = C1 x + D12 u`, `y = C2 x + D21 d`.
///
/// Inputs of `ss` are `[d, u]`, outputs `[z, y]`.
#[derive(Debug, Clone)]
pub struct GeneralizedPlant {
    pub ss: StateSpace,
    pub n_d: usize,
    pub n_u: usize,
    pub n_z: usize,
    pub n_y: usize,
    /// Grids (0-based) whose references form `u`.
    pub grids: Vec<usize>,
}

impl GeneralizedPlant {
    pub fn a1(&self) -> &Matrix {
        &self.ss.a
    }
    pub fn b1(&self) -> Matrix {
        self.ss.b.columns(0, self.n_d).into_owned()
    }
    pub fn b2(&self) -> Matrix {
        self.ss.b.columns(self.n_d, self.n_u).into_owned()
    }
    pub fn c1(&self) -> Matrix {
        self.ss.c.rows(0, self.n_z).into_owned()
    }
    pub fn c2(&self) -> Matrix {
        self.ss.c.rows(self.n_z, self.n_y).into_owned()
    }
    pub fn d11(&self) -> Matrix {
        self.ss.d.view((0, 0), (self.n_z, self.n_d)).into_owned()
    }
    pub fn d12(&self) -> Matrix {
        self.ss.d.view((0, self.n_d), (self.n_z, self.n_u)).into_owned()
    }
    pub fn d21(&self) -> Matrix {
        self.ss.d.view((self.n_z, 0), (self.n_y, self.n_d)).into_owned()
    }
    pub fn d22(&self) -> Matrix {
        self.ss.d.view((self.n_z, self.n_d), (self.n_y, self.n_u)).into_owned()
    }
    pub fn u_names(&self) -> &[String] {
        &self.ss.inputs[self.n_d..]
    }
    pub fn y_names(&self) -> &[String] {
        &self.ss.outputs[self.n_z..]
    }
    pub fn d_names(&self) -> &[String] {
        &self.ss.inputs[..self.n_d]
    }
    pub fn z_names(&self) -> &[String] {
        &self.ss.outputs[..self.n_z]
    }
}

/// Names of the performance signals `[Δf, ∫Δf, ΔV_dc, ∫ΔV_dc]` of grid
/// `k` (0-based).
pub fn performance_signals(k: usize) -> [String; 4] {
    let g = k + 1;
    [format!("df{g}"), format!("int_df{g}"), format!("dVdc{g}"), format!("int_dVdc{g}")]
}

/// Appends leaky integrators of `Δf_k` and `ΔV_dck` for each grid in
/// `grids` as extra states and outputs.
fn with_integrators(plant: &CompositePlant, grids: &[usize], leak: f64) -> Result<StateSpace> {
    let ss = &plant.ss;
    let (n, m, p) = (ss.n_states(), ss.n_inputs(), ss.n_outputs());
    let ni = 2 * grids.len();
    let mut a = Matrix::zeros(n + ni, n + ni);
    a.view_mut((0, 0), (n, n)).copy_from(&ss.a);
    let mut b = Matrix::zeros(n + ni, m);
    b.rows_mut(0, n).copy_from(&ss.b);
    let mut c = Matrix::zeros(p + ni, n + ni);
    c.view_mut((0, 0), (p, n)).copy_from(&ss.c);
    let mut d = Matrix::zeros(p + ni, m);
    d.rows_mut(0, p).copy_from(&ss.d);
    let mut states = ss.states.clone();
    let mut outputs = ss.outputs.clone();
    for (i, &k) in grids.iter().enumerate() {
        let [f, int_f, v, int_v] = performance_signals(k);
        for (j, (src, name)) in [(f, int_f), (v, int_v)].into_iter().enumerate() {
            let row = plant.output(&src)?;
            let s = n + 2 * i + j;
            a[(s, s)] = -leak;
            a.view_mut((s, 0), (1, n)).copy_from(&ss.c.row(row));
            b.row_mut(s).copy_from(&ss.d.row(row));
            c[(p + 2 * i + j, s)] = 1.0;
            states.push(format!("x_{name}"));
            outputs.push(name);
        }
    }
    StateSpace::new(a, b, c, d)?.named(&ss.inputs, &states, &outputs)
}

/// Builds the weighted generalized plant for the controller(s) acting on
/// `grids` (0-based). A single grid gives the decentralized problem of
/// that grid; all grids give the centralized problem.
///
/// `d` stacks the exogenous disturbances and the references of grids
/// outside `grids`; `y` stacks `Y_Tk` (single grid) or every local `Y_k`
/// (several grids). When `D12` or `D21` is rank deficient, `√ε`-scaled
/// control penalties or measurement-noise channels are appended.
pub fn make_generalized_plant(
    plant: &CompositePlant,
    grids: &[usize],
    weights: &Weights,
    opts: &PlantOptions,
) -> Result<GeneralizedPlant> {
    weights.validate()?;
    if !(opts.integrator_leak.is_finite() && opts.integrator_leak > 0.0) {
        return Err(Error::validation("integrator_leak", "must be positive"));
    }
    if !(opts.regularization.is_finite() && opts.regularization > 0.0) {
        return Err(Error::validation("regularization", "must be positive"));
    }
    if !(opts.vdc_scale.is_finite() && opts.vdc_scale > 0.0) {
        return Err(Error::validation("vdc_scale", "must be positive"));
    }
    let kk = plant.n_grids();
    if grids.is_empty() || grids.iter().any(|&k| k >= kk) {
        return Err(Error::validation("grids", format!("grid indices must lie in 0..{kk}")));
    }
    let aug = with_integrators(plant, grids, opts.integrator_leak)?.prefixed("P");

    let d_idx = {
        let mut v = plant.w_idx.clone();
        for (j, r) in plant.r_idx.iter().enumerate() {
            if !grids.contains(&j) {
                v.extend(r.iter().copied());
            }
        }
        v
    };
    let d_names: Vec<String> = d_idx.iter().map(|&i| plant.ss.inputs[i].clone()).collect();
    let u_names: Vec<String> = grids.iter().flat_map(|&k| plant.r_names(k)).collect();
    let y_names: Vec<String> = if grids.len() == 1 {
        plant.t_names(grids[0])
    } else {
        let mut v: Vec<String> = Vec::new();
        for &k in grids {
            v.extend(plant.y_idx[k].iter().map(|&i| plant.ss.outputs[i].clone()));
        }
        for j in (0..kk).filter(|j| !grids.contains(j)) {
            v.extend(plant.t_names(j)[..6].iter().cloned().filter(|n| n.starts_with("df") || n.starts_with("dVdc")));
        }
        v
    };
    let e_names: Vec<String> = grids.iter().flat_map(|&k| performance_signals(k)).collect();

    let we = weights.we.realize(e_names.len(), "We")?;
    let wu = weights.wu.realize(u_names.len(), "Wu")?;
    let wd = weights.wd.realize(d_names.len(), "Wd")?;
    let mut net = Connector::new();
    net.add(aug).add(we).add(wu).add(wd);
    for (i, d) in d_names.iter().enumerate() {
        net.input(&format!("d.{d}"), &[(&format!("Wd.in{i}"), 1.0)]);
        net.link(&format!("P.{d}"), &format!("Wd.out{i}"), 1.0);
    }
    for (i, u) in u_names.iter().enumerate() {
        net.input(u, &[(&format!("P.{u}"), 1.0), (&format!("Wu.in{i}"), 1.0)]);
    }
    for (i, e) in e_names.iter().enumerate() {
        let g = if e.contains("dVdc") { opts.vdc_scale } else { 1.0 };
        net.link(&format!("We.in{i}"), &format!("P.{e}"), g);
        net.output(&format!("z.{e}"), &[(&format!("We.out{i}"), 1.0)]);
    }
    for (i, u) in u_names.iter().enumerate() {
        net.output(&format!("z.{u}"), &[(&format!("Wu.out{i}"), 1.0)]);
    }
    for y in &y_names {
        net.output(y, &[(&format!("P.{y}"), 1.0)]);
    }
    let ss = net.build()?;
    let gp = GeneralizedPlant {
        n_d: d_names.len(),
        n_u: u_names.len(),
        n_z: e_names.len() + u_names.len(),
        n_y: y_names.len(),
        ss,
        grids: grids.to_vec(),
    };
    regularize(gp, opts.regularization)
}

fn full_rank(m: &Matrix, want: usize) -> bool {
    let sv = svd_singular_values(m);
    sv.len() >= want && sv.get(want.saturating_sub(1)).is_some_and(|&s| s > 1e-9 * sv[0].max(1.0))
}

/// Appends `√ε u` performance rows and `√ε` measurement-noise columns when
/// `D12` lacks full column rank or `D21` lacks full row rank.
fn regularize(mut gp: GeneralizedPlant, eps: f64) -> Result<GeneralizedPlant> {
    let se = eps.sqrt();
    if gp.n_u > 0 && !full_rank(&gp.d12(), gp.n_u) {
        let ss = &gp.ss;
        let (n, m, p) = (ss.n_states(), ss.n_inputs(), ss.n_outputs());
        let mut c = Matrix::zeros(p + gp.n_u, n);
        let mut d = Matrix::zeros(p + gp.n_u, m);
        c.rows_mut(0, gp.n_z).copy_from(&ss.c.rows(0, gp.n_z));
        d.rows_mut(0, gp.n_z).copy_from(&ss.d.rows(0, gp.n_z));
        for j in 0..gp.n_u {
            d[(gp.n_z + j, gp.n_d + j)] = se;
        }
        let rest = gp.n_z + gp.n_u;
        c.rows_mut(rest, gp.n_y).copy_from(&ss.c.rows(gp.n_z, gp.n_y));
        d.rows_mut(rest, gp.n_y).copy_from(&ss.d.rows(gp.n_z, gp.n_y));
        let mut outputs: Vec<String> = ss.outputs[..gp.n_z].to_vec();
        outputs.extend(gp.u_names().iter().map(|u| format!("eps.{u}")));
        outputs.extend(ss.outputs[gp.n_z..].iter().cloned());
        let new = StateSpace::new(ss.a.clone(), ss.b.clone(), c, d)?.named(&ss.inputs, &ss.states, &outputs)?;
        gp.ss = new;
        gp.n_z += gp.n_u;
    }
    if gp.n_y > 0 && !full_rank(&gp.d21().transpose(), gp.n_y) {
        let ss = &gp.ss;
        let (n, m, p) = (ss.n_states(), ss.n_inputs(), ss.n_outputs());
        let mut b = Matrix::zeros(n, m + gp.n_y);
        let mut d = Matrix::zeros(p, m + gp.n_y);
        b.columns_mut(0, gp.n_d).copy_from(&ss.b.columns(0, gp.n_d));
        d.columns_mut(0, gp.n_d).copy_from(&ss.d.columns(0, gp.n_d));
        for i in 0..gp.n_y {
            d[(gp.n_z + i, gp.n_d + i)] = se;
        }
        let rest = gp.n_d + gp.n_y;
        b.columns_mut(rest, gp.n_u).copy_from(&ss.b.columns(gp.n_d, gp.n_u));
        d.columns_mut(rest, gp.n_u).copy_from(&ss.d.columns(gp.n_d, gp.n_u));
        let mut inputs: Vec<String> = ss.inputs[..gp.n_d].to_vec();
        inputs.extend(gp.y_names().iter().map(|y| format!("noise.{y}")));
        inputs.extend(ss.inputs[gp.n_d..].iter().cloned());
        let new = StateSpace::new(ss.a.clone(), b, ss.c.clone(), d)?.named(&inputs, &ss.states, &ss.outputs)?;
        gp.ss = new;
        gp.n_d += gp.n_y;
    }
    Ok(gp)
}
