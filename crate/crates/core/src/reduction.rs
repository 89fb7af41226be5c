//! Square-root balanced truncation with Hankel singular value reporting.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::lti::StateSpace;
use crate::numerics::{hinf_norm, solve_lyapunov, Matrix};

/// HSVs below this fraction of the largest are treated as zero and their
/// states removed while balancing.
const HSV_FLOOR: f64 = 1e-12;

/// Balanced realization of a stable system.
#[derive(Debug, Clone)]
pub struct BalancedRealization {
    /// Balanced realization restricted to the states with nonzero HSV.
    pub sys: StateSpace,
    /// All Hankel singular values of the original system, non-increasing.
    pub hsv: Vec<f64>,
    /// `energy[r-1] = Σ_{i≤r} σ_i / Σ σ_i`; the last entry is exactly 1.
    pub energy: Vec<f64>,
}

impl BalancedRealization {
    /// Order of the original system.
    pub fn n(&self) -> usize {
        self.hsv.len()
    }

    /// Number of balanced states retained (nonzero HSVs).
    pub fn n_minimal(&self) -> usize {
        self.sys.n_states()
    }

    /// `2 Σ_{i>r} σ_i`.
    pub fn error_bound(&self, r: usize) -> f64 {
        2.0 * self.hsv.iter().skip(r).sum::<f64>()
    }

    /// Largest deviation of the balanced gramians from `diag(σ)`, relative
    /// to `σ₁`.
    pub fn gramian_defect(&self) -> Result<f64> {
        let s = &self.sys;
        if s.n_states() == 0 {
            return Ok(0.0);
        }
        let p = solve_lyapunov(&s.a, &(&s.b * s.b.transpose()))?;
        let q = solve_lyapunov(&s.a.transpose(), &(s.c.transpose() * &s.c))?;
        let sig = Matrix::from_diagonal(&nalgebra::DVector::from_iterator(
            s.n_states(),
            self.hsv.iter().take(s.n_states()).copied(),
        ));
        let s1 = self.hsv[0].max(f64::MIN_POSITIVE);
        Ok((p - &sig).amax().max((q - sig).amax()) / s1)
    }
}

/// Factor `L` with `M = L Lᵀ` for a symmetric positive semidefinite `M`.
fn psd_factor(m: &Matrix) -> Matrix {
    let eig = SymmetricEigen::new((m + m.transpose()) * 0.5);
    let mut l = eig.eigenvectors;
    for (j, &v) in eig.eigenvalues.iter().enumerate() {
        l.column_mut(j).scale_mut(v.max(0.0).sqrt());
    }
    l
}

/// Balances a stable system by the square-root method.
pub fn balance(sys: &StateSpace) -> Result<BalancedRealization> {
    let n = sys.n_states();
    if n == 0 {
        return Ok(BalancedRealization { sys: sys.clone(), hsv: vec![], energy: vec![] });
    }
    let spec = sys.spectrum()?;
    if !spec.is_hurwitz(0.0) {
        return Err(Error::NotHurwitz(format!(
            "balanced truncation needs a stable system, max real part {:.3e}",
            spec.max_real()
        )));
    }
    let p = solve_lyapunov(&sys.a, &(&sys.b * sys.b.transpose()))?;
    let q = solve_lyapunov(&sys.a.transpose(), &(sys.c.transpose() * &sys.c))?;
    let lc = psd_factor(&p);
    let lo = psd_factor(&q);
    let svd = (lo.transpose() * &lc).svd(true, true);
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Numerical("SVD of the gramian factor product failed".into())),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let hsv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].max(0.0)).collect();
    let s1 = hsv[0];
    let keep = if s1 > 0.0 { hsv.iter().take_while(|&&s| s > HSV_FLOOR * s1).count() } else { 0 };

    // T = Lc V Σ^{-1/2}, T⁻¹ = Σ^{-1/2} Uᵀ Loᵀ
    let mut t = Matrix::zeros(n, keep);
    let mut ti = Matrix::zeros(keep, n);
    let v = vt.transpose();
    for (j, &i) in order.iter().take(keep).enumerate() {
        let w = 1.0 / hsv[j].sqrt();
        t.set_column(j, &(&lc * v.column(i) * w));
        ti.set_row(j, &((lo.clone() * u.column(i)).transpose() * w));
    }
    let states: Vec<String> = (0..keep).map(|i| format!("bal{i}")).collect();
    let mut red = StateSpace::new(&ti * &sys.a * &t, &ti * &sys.b, &sys.c * &t, sys.d.clone())?;
    red.inputs = sys.inputs.clone();
    red.outputs = sys.outputs.clone();
    red.states = states;

    let total: f64 = hsv.iter().sum();
    let mut energy = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &s in &hsv {
        acc += s;
        energy.push(if total > 0.0 { acc / total } else { 1.0 });
    }
    energy[n - 1] = 1.0;
    Ok(BalancedRealization { sys: red, hsv, energy })
}

/// Keeps the first `r` balanced states. Returns the reduced model and the
/// a-priori error bound `2 Σ_{i>r} σ_i`.
pub fn truncate(bal: &BalancedRealization, r: usize) -> Result<(StateSpace, f64)> {
    if r == 0 || r > bal.n() {
        return Err(Error::validation("order", format!("must be in 1..={}, got {r}", bal.n())));
    }
    let k = r.min(bal.n_minimal());
    let s = &bal.sys;
    let mut out = StateSpace::new(
        s.a.view((0, 0), (k, k)).into_owned(),
        s.b.rows(0, k).into_owned(),
        s.c.columns(0, k).into_owned(),
        s.d.clone(),
    )?;
    out.inputs = s.inputs.clone();
    out.outputs = s.outputs.clone();
    out.states = s.states[..k].to_vec();
    Ok((out, bal.error_bound(r)))
}

/// Smallest `r` whose cumulative energy reaches `threshold`.
pub fn select_order(bal: &BalancedRealization, threshold: f64) -> Result<usize> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::validation("energy_threshold", format!("must be in (0, 1], got {threshold}")));
    }
    Ok(bal.energy.iter().position(|&e| e >= threshold).map_or(bal.n(), |i| i + 1))
}

/// `G − G_r` as a single realization.
pub fn error_system(g: &StateSpace, gr: &StateSpace) -> Result<StateSpace> {
    let neg = StateSpace::new(gr.a.clone(), gr.b.clone(), -&gr.c, -&gr.d)?;
    let both = StateSpace::append(&[g, &neg]);
    let m = g.n_inputs();
    let p = g.n_outputs();
    // stacked inputs [u; u], summed outputs
    let mut e = Matrix::zeros(2 * m, m);
    let mut s = Matrix::zeros(p, 2 * p);
    for i in 0..m {
        e[(i, i)] = 1.0;
        e[(m + i, i)] = 1.0;
    }
    for i in 0..p {
        s[(i, i)] = 1.0;
        s[(i, p + i)] = 1.0;
    }
    StateSpace::new(both.a.clone(), &both.b * &e, &s * &both.c, &s * &both.d * &e)
}

/// Outcome of a checked reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub sys: StateSpace,
    pub order: usize,
    pub full_order: usize,
    /// Order picked by the energy threshold before any increase.
    pub energy_order: usize,
    pub bound: f64,
    /// `‖G − G_r‖∞` from the H∞ norm routine.
    pub error: f64,
    pub hsv: Vec<f64>,
    pub energy: Vec<f64>,
}

impl Reduction {
    pub fn bound_holds(&self) -> bool {
        self.error <= self.bound * (1.0 + 1e-6) + 1e-9
    }
}

/// Reduces to the energy-threshold order, then raises the order until
/// `accept` holds for the reduced model.
pub fn reduce_checked<F>(sys: &StateSpace, threshold: f64, accept: F) -> Result<Reduction>
where
    F: Fn(&StateSpace) -> Result<bool>,
{
    let bal = balance(sys)?;
    let n = bal.n();
    if n == 0 {
        return Ok(Reduction {
            sys: sys.clone(),
            order: 0,
            full_order: 0,
            energy_order: 0,
            bound: 0.0,
            error: 0.0,
            hsv: vec![],
            energy: vec![],
        });
    }
    let r0 = select_order(&bal, threshold)?;
    for r in r0..=n {
        let (red, bound) = truncate(&bal, r)?;
        if red.n_states() > 0 && !red.is_stable()? {
            continue;
        }
        if !accept(&red)? {
            continue;
        }
        let error = hinf_norm(&error_system(sys, &red)?)?.gamma;
        return Ok(Reduction {
            sys: red,
            order: r,
            full_order: n,
            energy_order: r0,
            bound,
            error,
            hsv: bal.hsv.clone(),
            energy: bal.energy.clone(),
        });
    }
    Err(Error::Numerical("no reduced order passed the acceptance check".into()))
}
