//! Dense linear-algebra and control kernels.

use nalgebra::DMatrix;
use num_complex::Complex64;

mod eig;
mod expm;
mod lyapunov;
mod norm;
mod riccati;
pub mod schur;

pub use eig::{eigenvalues, svd_singular_values, Spectrum};
pub use expm::{expm, zoh_discretize};
pub use lyapunov::{lyapunov_residual, solve_lyapunov};
pub use norm::{hinf_norm, sigma_max_at, HinfNorm};
pub use riccati::{are_residual, solve_are, solve_are_with, AreOptions};

pub type Matrix = DMatrix<f64>;
pub type CMatrix = DMatrix<Complex64>;

/// Absolute real-part threshold below which a Hamiltonian eigenvalue is
/// treated as lying on the imaginary axis.
pub const IMAG_AXIS_TOL: f64 = 1e-9;

pub(crate) fn check_square(name: &str, a: &Matrix) -> crate::Result<()> {
    if a.nrows() != a.ncols() {
        return Err(crate::Error::Dimension(format!(
            "{name} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn check_finite(name: &str, a: &Matrix) -> crate::Result<()> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(crate::Error::Numerical(format!("{name} has non-finite entries")));
    }
    Ok(())
}

pub(crate) fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

/// Frobenius norm, zero for empty matrices.
pub fn fro(a: &Matrix) -> f64 {
    a.norm()
}
