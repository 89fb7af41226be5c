use super::lyapunov::solve_with_schur;
use super::schur::{balance, max_abs_imag, real_part, ComplexSchur};
use super::{check_finite, check_square, fro, symmetrize, Matrix, IMAG_AXIS_TOL};
use crate::error::{Error, Result};

/// Tuning knobs for [`solve_are`].
#[derive(Debug, Clone, Copy)]
pub struct AreOptions {
    /// Newton correction sweeps applied after the Schur solve.
    pub refine_steps: usize,
    /// Residual acceptance factor relative to `max(1, ‖Q‖_F)`.
    pub residual_tol: f64,
    /// Closed-loop eigenvalues must have real part below `-hurwitz_margin`.
    pub hurwitz_margin: f64,
}

impl Default for AreOptions {
    fn default() -> Self {
        Self { refine_steps: 2, residual_tol: 1e-6, hurwitz_margin: 1e-10 }
    }
}

fn residual(a: &Matrix, r: &Matrix, q: &Matrix, x: &Matrix) -> Matrix {
    a.transpose() * x + x * a + x * r * x + q
}

/// Stabilizing solution of `AᵀX + XA + X R X + Q = 0`.
///
/// Uses the stable invariant subspace of the Hamiltonian
/// `[A, R; -Q, -Aᵀ]`, followed by optional Newton correction.
pub fn solve_are(a: &Matrix, r: &Matrix, q: &Matrix) -> Result<Matrix> {
    solve_are_with(a, r, q, AreOptions::default())
}

pub fn solve_are_with(a: &Matrix, r: &Matrix, q: &Matrix, opts: AreOptions) -> Result<Matrix> {
    check_square("A", a)?;
    let n = a.nrows();
    for (name, m) in [("R", r), ("Q", q)] {
        check_square(name, m)?;
        check_finite(name, m)?;
        if m.nrows() != n {
            return Err(Error::Dimension(format!("{name} must be {n}x{n}")));
        }
    }
    check_finite("A", a)?;
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let r = symmetrize(r);
    let q = symmetrize(q);

    let mut h = Matrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&r);
    h.view_mut((n, 0), (n, n)).copy_from(&(-&q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let (hb, scale) = balance(&h);
    let mut schur = ComplexSchur::new(&hb)?;
    if let Some(l) = schur.eigenvalues().iter().find(|l| l.re.abs() < IMAG_AXIS_TOL) {
        return Err(Error::Infeasible(format!("Hamiltonian eigenvalue {l} on the imaginary axis")));
    }
    let stable = schur.reorder(|l| l.re < 0.0);
    if stable != n {
        return Err(Error::Infeasible(format!("{stable} stable Hamiltonian eigenvalues, expected {n}")));
    }
    // undo the balancing on the stable basis, then re-orthonormalize
    let mut basis = schur.u.columns(0, n).into_owned();
    for (i, &s) in scale.iter().enumerate() {
        basis.row_mut(i).scale_mut(s);
    }
    let basis = basis.qr().q();
    let u11 = basis.view((0, 0), (n, n)).into_owned();
    let u21 = basis.view((n, 0), (n, n)).into_owned();
    let sv = u11.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smax == 0.0 || smin / smax < 1e-12 {
        return Err(Error::Infeasible(format!("stable subspace not a graph (cond {:.3e})", smax / smin)));
    }
    // X = U21 U11⁻¹  ⇔  U11ᵀ Xᵀ = U21ᵀ (complex transpose without conjugation)
    let lu = u11.transpose().lu();
    let xt = lu
        .solve(&u21.transpose())
        .ok_or_else(|| Error::Infeasible("singular U11".into()))?;
    let xc = xt.transpose();
    let scale = fro(&real_part(&xc)).max(1.0);
    if max_abs_imag(&xc) > 1e-6 * scale {
        log::debug!("ARE solution has imaginary residue {:.3e}", max_abs_imag(&xc));
    }
    let mut x = symmetrize(&real_part(&xc));

    let qn = fro(&q).max(1.0);
    let mut res = fro(&residual(a, &r, &q, &x));
    for _ in 0..opts.refine_steps {
        if res <= 1e-14 * qn {
            break;
        }
        let acl = a + &r * &x;
        let Ok(s) = ComplexSchur::new(&acl.transpose()) else { break };
        if s.eigenvalues().iter().any(|l| l.re >= 0.0) {
            break;
        }
        // (A+RX)ᵀ Δ + Δ (A+RX) + F(X) = 0
        let f = residual(a, &r, &q, &x);
        let delta = solve_with_schur(&s, &symmetrize(&f));
        let cand = symmetrize(&(&x + delta));
        let cres = fro(&residual(a, &r, &q, &cand));
        if cres < res {
            x = cand;
            res = cres;
        } else {
            break;
        }
    }

    if res > opts.residual_tol * qn {
        return Err(Error::Infeasible(format!("Riccati residual {res:.3e} too large")));
    }
    let acl = a + &r * &x;
    let spec = super::eigenvalues(&acl)?;
    if !spec.is_hurwitz(opts.hurwitz_margin) {
        return Err(Error::Infeasible(format!(
            "closed loop A + R X not Hurwitz (max real part {:.3e})",
            spec.max_real()
        )));
    }
    Ok(x)
}

/// Residual `‖AᵀX + XA + XRX + Q‖_F`.
pub fn are_residual(a: &Matrix, r: &Matrix, q: &Matrix, x: &Matrix) -> f64 {
    fro(&residual(a, r, q, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_quadratic() {
        let one = |v: f64| Matrix::from_element(1, 1, v);
        let x = solve_are(&one(-1.0), &one(-1.0), &one(1.0)).unwrap();
        assert!((x[(0, 0)] - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_q_gives_zero() {
        let a = Matrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -3.0]);
        let x = solve_are(&a, &(-Matrix::identity(2, 2)), &Matrix::zeros(2, 2)).unwrap();
        assert!(x.norm() < 1e-12);
    }

    #[test]
    fn imaginary_axis_is_infeasible() {
        // a = 0, r = 0, q = 0 puts both Hamiltonian eigenvalues at 0
        let z = Matrix::zeros(1, 1);
        assert!(matches!(solve_are(&z, &z, &z), Err(Error::Infeasible(_))));
    }

    #[test]
    fn unstable_lqr_instance() {
        let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, -1.0]);
        let b = Matrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let r = -(&b * b.transpose());
        let q = Matrix::identity(2, 2);
        let x = solve_are(&a, &r, &q).unwrap();
        assert!(are_residual(&a, &r, &q, &x) < 1e-10);
        assert!(super::super::eigenvalues(&(a + r * &x)).unwrap().is_hurwitz(0.0));
    }
}
