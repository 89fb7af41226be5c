use super::{check_finite, check_square, Matrix};
use crate::error::{Error, Result};

/// Matrix exponential (Padé scaling and squaring, provided by nalgebra).
pub fn expm(a: &Matrix) -> Result<Matrix> {
    check_square("A", a)?;
    check_finite("A", a)?;
    if a.nrows() == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let e = a.clone().exp();
    check_finite("exp(A)", &e)?;
    Ok(e)
}

/// Zero-order-hold discretization `(A_d, B_d)` at step `h`.
///
/// Both blocks come from a single exponential of `[[A, B], [0, 0]]·h`.
pub fn zoh_discretize(a: &Matrix, b: &Matrix, h: f64) -> Result<(Matrix, Matrix)> {
    check_square("A", a)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::validation("h", format!("step must be positive, got {h}")));
    }
    let n = a.nrows();
    if b.nrows() != n {
        return Err(Error::Dimension(format!("B has {} rows, A is {n}x{n}", b.nrows())));
    }
    let m = b.ncols();
    let mut aug = Matrix::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * h));
    aug.view_mut((0, n), (n, m)).copy_from(&(b * h));
    let e = expm(&aug)?;
    Ok((e.view((0, 0), (n, n)).into_owned(), e.view((0, n), (n, m)).into_owned()))
}
