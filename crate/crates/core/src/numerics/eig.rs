use super::schur::{balance, complex_qr, real_schur};
use num_complex::Complex64;

use super::{check_finite, check_square, Matrix};
use crate::error::Result;

/// Eigenvalues of a real square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest real part, `-inf` for an empty spectrum.
    pub fn max_real(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every eigenvalue has real part strictly below `-margin`.
    pub fn is_hurwitz(&self, margin: f64) -> bool {
        self.eigenvalues.iter().all(|l| l.re < -margin)
    }

    /// Eigenvalues sorted by descending real part, ties by imaginary part.
    pub fn sorted(&self) -> Vec<Complex64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Damping ratio `-Re/|λ|` of each eigenvalue (1 for λ = 0).
    pub fn damping(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .map(|l| {
                let m = l.norm();
                if m == 0.0 {
                    1.0
                } else {
                    -l.re / m
                }
            })
            .collect()
    }
}

/// All eigenvalues of `a`, complex ones in exact conjugate pairs.
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum> {
    check_square("A", a)?;
    check_finite("A", a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Spectrum { eigenvalues: vec![] });
    }
    let (b, _) = balance(a);
    let t = match real_schur(&b) {
        Ok((_, t)) => t,
        Err(crate::Error::Numerical(_)) => return Ok(Spectrum { eigenvalues: paired(complex_qr(&b)?.eigenvalues()) }),
        Err(e) => return Err(e),
    };
    let mut ev = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a11, a12, a21, a22) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = 0.5 * (a11 + a22);
            let det = a11 * a22 - a12 * a21;
            let disc = half_tr * half_tr - det;
            if disc < 0.0 {
                let im = (-disc).sqrt();
                ev.push(Complex64::new(half_tr, im));
                ev.push(Complex64::new(half_tr, -im));
            } else {
                let s = disc.sqrt();
                ev.push(Complex64::new(half_tr + s, 0.0));
                ev.push(Complex64::new(half_tr - s, 0.0));
            }
            i += 2;
        } else {
            ev.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    Ok(Spectrum { eigenvalues: ev })
}

/// Snaps the eigenvalues of a real matrix into exact conjugate pairs.
fn paired(mut ev: Vec<Complex64>) -> Vec<Complex64> {
    let scale = ev.iter().fold(1.0f64, |m, l| m.max(l.norm()));
    let mut out = Vec::with_capacity(ev.len());
    while let Some(l) = ev.pop() {
        if l.im.abs() <= 1e-10 * scale {
            out.push(Complex64::new(l.re, 0.0));
            continue;
        }
        let target = l.conj();
        let best = ev
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
            .map(|(i, _)| i);
        match best {
            Some(i) => {
                let m = ev.swap_remove(i);
                let re = 0.5 * (l.re + m.re);
                let im = 0.5 * (l.im.abs() + m.im.abs());
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
            None => out.push(Complex64::new(l.re, 0.0)),
        }
    }
    out
}

/// Singular values in non-increasing order.
pub fn svd_singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().map(|v| v.abs()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rotation() {
        let s = eigenvalues(&Matrix::from_diagonal(&nalgebra::dvector![-1.0, -2.0])).unwrap();
        let mut re: Vec<f64> = s.eigenvalues.iter().map(|l| l.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![-2.0, -1.0]);
        let r = eigenvalues(&Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let mut im: Vec<f64> = r.eigenvalues.iter().map(|l| l.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + 1.0).abs() < 1e-14 && (im[1] - 1.0).abs() < 1e-14);
        assert!(r.eigenvalues.iter().all(|l| l.re.abs() < 1e-14));
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(eigenvalues(&Matrix::zeros(2, 3)), Err(crate::Error::Dimension(_))));
    }

    #[test]
    fn singular_values_sorted_absolute() {
        let m = Matrix::from_diagonal(&nalgebra::dvector![3.0, -4.0]);
        assert_eq!(svd_singular_values(&m), vec![4.0, 3.0]);
        assert_eq!(svd_singular_values(&Matrix::identity(3, 3)), vec![1.0; 3]);
    }
}
