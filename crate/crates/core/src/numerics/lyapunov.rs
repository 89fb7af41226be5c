use num_complex::Complex64;

use super::schur::{real_part, to_complex, ComplexSchur};
use super::{check_finite, check_square, fro, symmetrize, CMatrix, Matrix};
use crate::error::{Error, Result};

/// Solves `A P + P Aᵀ + Q = 0` for Hurwitz `A`.
pub fn solve_lyapunov(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    check_square("A", a)?;
    check_square("Q", q)?;
    check_finite("Q", q)?;
    if a.nrows() != q.nrows() {
        return Err(Error::Dimension(format!(
            "A is {n}x{n} but Q is {m}x{m}",
            n = a.nrows(),
            m = q.nrows()
        )));
    }
    let schur = ComplexSchur::new(a)?;
    if let Some(l) = schur.eigenvalues().iter().find(|l| l.re >= 0.0) {
        return Err(Error::NotHurwitz(format!("A has eigenvalue {l}")));
    }
    Ok(symmetrize(&solve_with_schur(&schur, q)))
}

/// Bartels–Stewart back substitution on a complex Schur factorization.
/// Does not check stability; callers guarantee no `λ_i + conj(λ_j) = 0`.
pub(crate) fn solve_with_schur(schur: &ComplexSchur, q: &Matrix) -> Matrix {
    let n = q.nrows();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let u = &schur.u;
    let t = &schur.t;
    // T Y + Y Tᴴ = C with C = -Uᴴ Q U
    let c: CMatrix = -(u.adjoint() * to_complex(q) * u);
    let mut y = CMatrix::zeros(n, n);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for j in (0..n).rev() {
        for i in 0..n {
            let mut s = c[(i, j)];
            for k in (j + 1)..n {
                s -= y[(i, k)] * t[(j, k)].conj();
            }
            rhs[i] = s;
        }
        let shift = t[(j, j)].conj();
        // upper triangular solve of (T + shift I) y_j = rhs
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in (i + 1)..n {
                s -= t[(i, k)] * y[(k, j)];
            }
            y[(i, j)] = s / (t[(i, i)] + shift);
        }
    }
    real_part(&(u * y * u.adjoint()))
}

/// Residual `‖A P + P Aᵀ + Q‖_F`.
pub fn lyapunov_residual(a: &Matrix, p: &Matrix, q: &Matrix) -> f64 {
    fro(&(a * p + p * a.transpose() + q))
}
