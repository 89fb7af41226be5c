//! Riccati-based H∞ synthesis: feasibility test, γ-iteration and the
//! central controller.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::controller::Controller;
use super::generalized::GeneralizedPlant;
use crate::error::{Error, Result};
use crate::lti::StateSpace;
use crate::numerics::{are_residual, eigenvalues, fro, hinf_norm, solve_are, Matrix};

/// Outcome of the three existence conditions at one γ.
#[derive(Debug, Clone)]
pub struct Feasibility {
    pub gamma: f64,
    pub x: Option<Matrix>,
    pub y: Option<Matrix>,
    /// Spectral radius of `X∞Y∞` (NaN when either ARE failed).
    pub rho: f64,
    pub x_ok: bool,
    pub y_ok: bool,
    pub rho_ok: bool,
    pub x_residual: f64,
    pub y_residual: f64,
}

impl Feasibility {
    pub fn feasible(&self) -> bool {
        self.x_ok && self.y_ok && self.rho_ok
    }
}

/// One entry of the γ sequence.
#[derive(Debug, Clone, Serialize)]
pub struct GammaStep {
    pub gamma: f64,
    pub x_ok: bool,
    pub y_ok: bool,
    pub rho_ok: bool,
    pub rho: f64,
}

impl GammaStep {
    pub fn feasible(&self) -> bool {
        self.x_ok && self.y_ok && self.rho_ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub steps: Vec<GammaStep>,
    /// Level at which the controller was realized.
    pub gamma: f64,
    /// Smallest γ proven infeasible.
    pub gamma_lower: f64,
    pub rho: f64,
    pub x_residual: f64,
    pub y_residual: f64,
    /// `‖T_zd‖∞` of the closed loop with the realized controller.
    pub closed_loop_norm: f64,
    pub order: usize,
}

impl SynthesisReport {
    /// Accepted (feasible) levels in the order they were found.
    pub fn accepted(&self) -> Vec<f64> {
        self.steps.iter().filter(|s| s.feasible()).map(|s| s.gamma).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GammaOptions {
    /// Relative bracket width at which bisection stops.
    pub tol: f64,
    pub gamma_hi: Option<f64>,
    pub gamma_lo: Option<f64>,
    pub max_bracket_steps: usize,
    /// Relative margin above the converged level at which the controller
    /// is realized.
    pub backoff: f64,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self { tol: 1e-3, gamma_hi: None, gamma_lo: None, max_bracket_steps: 60, backoff: 0.0 }
    }
}

/// Terms shared by every γ.
struct Pieces {
    a: Matrix,
    b1: Matrix,
    b2: Matrix,
    c1: Matrix,
    c2: Matrix,
    d12: Matrix,
    d21: Matrix,
    r1_inv: Matrix,
    r2_inv: Matrix,
}

impl Pieces {
    fn new(gp: &GeneralizedPlant) -> Result<Self> {
        if fro(&gp.d11()) > 0.0 || fro(&gp.d22()) > 0.0 {
            return Err(Error::validation("generalized_plant", "D11 and D22 must be zero"));
        }
        let d12 = gp.d12();
        let d21 = gp.d21();
        let r1_inv = (d12.transpose() * &d12)
            .try_inverse()
            .ok_or_else(|| Error::Numerical("D12ᵀD12 is singular".into()))?;
        let r2_inv = (&d21 * d21.transpose())
            .try_inverse()
            .ok_or_else(|| Error::Numerical("D21D21ᵀ is singular".into()))?;
        Ok(Self { a: gp.a1().clone(), b1: gp.b1(), b2: gp.b2(), c1: gp.c1(), c2: gp.c2(), d12, d21, r1_inv, r2_inv })
    }

    /// `(A, R, Q)` of the state-feedback ARE `AᵀX + XA + XRX + Q = 0`.
    fn x_terms(&self, g2: f64) -> (Matrix, Matrix, Matrix) {
        let p = &self.b2 * &self.r1_inv;
        let a = &self.a - &p * self.d12.transpose() * &self.c1;
        let r = &self.b1 * self.b1.transpose() * g2 - &p * self.b2.transpose();
        let nz = self.c1.nrows();
        let proj = Matrix::identity(nz, nz) - &self.d12 * &self.r1_inv * self.d12.transpose();
        let q = self.c1.transpose() * proj * &self.c1;
        (a, r, q)
    }

    /// `(Aᵀ, R, Q)` of the filter ARE `AY + YAᵀ + YRY + Q = 0`.
    fn y_terms(&self, g2: f64) -> (Matrix, Matrix, Matrix) {
        let p = self.c2.transpose() * &self.r2_inv;
        let a = &self.a - &self.b1 * self.d21.transpose() * &self.r2_inv * &self.c2;
        let r = self.c1.transpose() * &self.c1 * g2 - &p * &self.c2;
        let nd = self.b1.ncols();
        let proj = Matrix::identity(nd, nd) - self.d21.transpose() * &self.r2_inv * &self.d21;
        let q = &self.b1 * proj * self.b1.transpose();
        (a.transpose(), r, q)
    }
}

fn psd(x: &Matrix) -> bool {
    if x.nrows() == 0 {
        return true;
    }
    let ev = SymmetricEigen::new(x.clone()).eigenvalues;
    let scale = x.amax().max(1.0);
    ev.iter().all(|&l| l >= -1e-8 * scale)
}

fn spectral_radius(m: &Matrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(eigenvalues(m)?.eigenvalues.iter().fold(0.0, |r, l| r.max(l.norm())))
}

fn check_with(p: &Pieces, gamma: f64) -> Result<Feasibility> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::validation("gamma", format!("must be positive, got {gamma}")));
    }
    let g2 = gamma.powi(-2);
    let mut out = Feasibility {
        gamma,
        x: None,
        y: None,
        rho: f64::NAN,
        x_ok: false,
        y_ok: false,
        rho_ok: false,
        x_residual: f64::NAN,
        y_residual: f64::NAN,
    };
    let solve = |(a, r, q): (Matrix, Matrix, Matrix)| -> Result<Option<(Matrix, f64)>> {
        match solve_are(&a, &r, &q) {
            Ok(x) => {
                let res = are_residual(&a, &r, &q, &x) / fro(&q).max(1.0);
                Ok(psd(&x).then_some((x, res)))
            }
            Err(e @ (Error::Infeasible(_) | Error::Numerical(_) | Error::NotHurwitz(_))) => {
                log::debug!("γ = {gamma:.6e}: {e}");
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    if let Some((x, res)) = solve(p.x_terms(g2))? {
        out.x_ok = true;
        out.x_residual = res;
        out.x = Some(x);
    }
    if let Some((y, res)) = solve(p.y_terms(g2))? {
        out.y_ok = true;
        out.y_residual = res;
        out.y = Some(y);
    }
    if let (Some(x), Some(y)) = (&out.x, &out.y) {
        out.rho = spectral_radius(&(x * y))?;
        out.rho_ok = out.rho < gamma * gamma;
    }
    Ok(out)
}

/// Tests the DGKF existence conditions at `gamma`.
pub fn check_feasibility(gp: &GeneralizedPlant, gamma: f64) -> Result<Feasibility> {
    check_with(&Pieces::new(gp)?, gamma)
}

/// Central controller `[A∞, −Z∞L∞; F∞, 0]` at a feasible level.
fn central(p: &Pieces, f: &Feasibility) -> Result<StateSpace> {
    let (x, y) = match (&f.x, &f.y) {
        (Some(x), Some(y)) if f.feasible() => (x, y),
        _ => return Err(Error::NoController(format!("γ = {} is not feasible", f.gamma))),
    };
    let g2 = f.gamma.powi(-2);
    let n = p.a.nrows();
    let ff = -(&p.r1_inv) * (p.b2.transpose() * x + p.d12.transpose() * &p.c1);
    let ll = -(y * p.c2.transpose() + &p.b1 * p.d21.transpose()) * &p.r2_inv;
    let zz = (Matrix::identity(n, n) - y * x * g2)
        .try_inverse()
        .ok_or_else(|| Error::Numerical("I − γ⁻²Y∞X∞ is singular".into()))?;
    let zl = &zz * &ll;
    let a_inf =
        &p.a + &p.b1 * p.b1.transpose() * x * g2 + &p.b2 * &ff + &zl * (&p.c2 + &p.d21 * p.b1.transpose() * x * g2);
    let nu = p.b2.ncols();
    StateSpace::new(a_inf, -zl, ff, Matrix::zeros(nu, p.c2.nrows()))
}

/// Bisects γ between an infeasible lower and a feasible upper level and
/// realizes the central controller at the final feasible level.
pub fn gamma_iterate(gp: &GeneralizedPlant, opts: &GammaOptions) -> Result<(Controller, SynthesisReport)> {
    let p = Pieces::new(gp)?;
    let mut steps = Vec::new();
    let probe = |g: f64, steps: &mut Vec<GammaStep>| -> Result<Feasibility> {
        let f = check_with(&p, g)?;
        log::debug!("γ = {g:.6e}: X {} Y {} ρ {:.4e}", f.x_ok, f.y_ok, f.rho);
        steps.push(GammaStep { gamma: g, x_ok: f.x_ok, y_ok: f.y_ok, rho_ok: f.rho_ok, rho: f.rho });
        Ok(f)
    };

    let mut hi = opts.gamma_hi.unwrap_or(1.0);
    let mut best = probe(hi, &mut steps)?;
    let mut n = 0;
    while !best.feasible() {
        n += 1;
        if n > opts.max_bracket_steps {
            return Err(Error::NoController(format!("no feasible γ up to {hi:.3e}")));
        }
        hi *= 2.0;
        best = probe(hi, &mut steps)?;
    }
    let mut lo = match opts.gamma_lo {
        Some(l) if l < hi => l,
        _ => hi / 2.0,
    };
    let mut n = 0;
    loop {
        if lo <= 0.0 {
            break;
        }
        let f = probe(lo, &mut steps)?;
        if !f.feasible() {
            break;
        }
        hi = lo;
        best = f;
        n += 1;
        if n > opts.max_bracket_steps {
            lo = 0.0;
            break;
        }
        lo = hi / 2.0;
    }
    while (hi - lo) / hi >= opts.tol {
        let mid = 0.5 * (hi + lo);
        let f = probe(mid, &mut steps)?;
        if f.feasible() {
            hi = mid;
            best = f;
        } else {
            lo = mid;
        }
    }

    if opts.backoff > 0.0 {
        let f = probe(hi * (1.0 + opts.backoff), &mut steps)?;
        if f.feasible() {
            best = f;
        }
    }

    // Near the optimum Z∞ can be badly conditioned; step up within a few
    // tolerance widths until the realized loop verifies.
    let mut attempt = 0;
    loop {
        if let Some((k, nrm)) = verified(gp, &p, &best)? {
            let report = SynthesisReport {
                steps,
                gamma: best.gamma,
                gamma_lower: lo,
                rho: best.rho,
                x_residual: best.x_residual,
                y_residual: best.y_residual,
                closed_loop_norm: nrm,
                order: k.order(),
            };
            return Ok((k, report));
        }
        attempt += 1;
        if attempt > 20 {
            return Err(Error::NoController(format!("central controller failed verification near γ = {:.4e}", best.gamma)));
        }
        let g = best.gamma * (1.0 + 2.0 * opts.tol);
        let f = probe(g, &mut steps)?;
        if f.feasible() {
            best = f;
        } else {
            return Err(Error::NoController(format!("feasibility lost at γ = {g:.4e}")));
        }
    }
}

/// Central controller at `f`, if the closed loop is stable with norm
/// below `f.gamma`.
fn verified(gp: &GeneralizedPlant, p: &Pieces, f: &Feasibility) -> Result<Option<(Controller, f64)>> {
    let k = central(p, f)?;
    let cl = gp.ss.lower_lft(&k, gp.n_u, gp.n_y)?;
    if !cl.is_stable()? {
        return Ok(None);
    }
    let nrm = hinf_norm(&cl)?.gamma;
    if nrm >= f.gamma {
        return Ok(None);
    }
    let states: Vec<String> = (0..gp.ss.n_states()).map(|i| format!("xk{i}")).collect();
    let k = k.named(gp.y_names(), &states, gp.u_names())?;
    Ok(Some((Controller::new(k, gp.grids.clone(), Some(f.gamma)), nrm)))
}

/// Central controller at a given level. Returns the controller and the
/// achieved closed-loop norm.
pub fn realize_at(gp: &GeneralizedPlant, gamma: f64) -> Result<(Controller, f64)> {
    let p = Pieces::new(gp)?;
    let f = check_with(&p, gamma)?;
    if !f.feasible() {
        return Err(Error::NoController(format!("γ = {gamma:.4e} is not feasible")));
    }
    verified(gp, &p, &f)?
        .ok_or_else(|| Error::NoController(format!("central controller at γ = {gamma:.4e} failed verification")))
}
