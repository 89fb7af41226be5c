//! Real and complex Schur forms with eigenvalue reordering.
//!
//! nalgebra provides the real Schur decomposition. The quasi-triangular
//! factor is converted to a complex triangular one so that eigenvalues can
//! be reordered with plain Givens swaps.

use nalgebra::Schur;
use num_complex::Complex64;

use super::{CMatrix, Matrix};
use crate::error::{Error, Result};

/// Complex Schur decomposition `A = U T Uᴴ` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct ComplexSchur {
    pub u: CMatrix,
    pub t: CMatrix,
}

/// Real Schur decomposition `A = Q T Qᵀ`, `T` quasi upper triangular.
pub fn real_schur(a: &Matrix) -> Result<(Matrix, Matrix)> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "Schur needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let n = a.nrows();
    // nalgebra's QR sweep has no exceptional shifts; a slightly looser
    // deflation threshold rescues the rare stalls.
    for eps in [f64::EPSILON, 4.0 * f64::EPSILON, 1e-14, 1e-13] {
        if let Some(schur) = Schur::try_new(a.clone(), eps, 200 * n.max(10)) {
            return Ok(schur.unpack());
        }
    }
    Err(Error::Numerical(format!("real Schur failed to converge (n = {n})")))
}

/// Diagonal similarity `B = D⁻¹ A D` with power-of-two scalings that
/// equalize row and column norms. Returns `B` and the diagonal of `D`.
pub fn balance(a: &Matrix) -> (Matrix, Vec<f64>) {
    let n = a.nrows();
    let mut b = a.clone();
    let mut d = vec![1.0; n];
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += b[(j, i)].abs();
                r += b[(i, j)].abs();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= 2.0 * r {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if c + r < 0.95 * total {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
    }
    (b, d)
}

impl ComplexSchur {
    pub fn new(a: &Matrix) -> Result<Self> {
        match complex_qr(a) {
            Ok(s) => Ok(s),
            Err(Error::Numerical(_)) => real_schur(a).map(|(q, t)| rsf_to_csf(&q, &t)),
            Err(e) => Err(e),
        }
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Moves every eigenvalue satisfying `select` to the leading block and
    /// returns how many were selected.
    pub fn reorder<F: Fn(Complex64) -> bool>(&mut self, select: F) -> usize {
        let n = self.t.nrows();
        let mut head = 0;
        for j in 0..n {
            if select(self.t[(j, j)]) {
                let mut k = j;
                while k > head {
                    swap_adjacent(&mut self.t, &mut self.u, k - 1);
                    k -= 1;
                }
                head += 1;
            }
        }
        head
    }
}

/// Complex Schur form by single-shift QR on the Hessenberg form, with
/// Wilkinson shifts and periodic exceptional shifts.
pub fn complex_qr(a: &Matrix) -> Result<ComplexSchur> {
    let n = a.nrows();
    if n == 0 || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("complex QR needs a finite non-empty matrix".into()));
    }
    let hess = nalgebra::linalg::Hessenberg::new(a.clone());
    let (q, h) = hess.unpack();
    let mut t = to_complex(&h);
    let mut u = to_complex(&q);
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let abs1 = |z: Complex64| z.re.abs() + z.im.abs();
    let zero = Complex64::new(0.0, 0.0);

    let mut hi = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // find the active block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(t[(lo, lo - 1)]);
            if sub <= smlnum {
                break;
            }
            let mut tst = abs1(t[(lo - 1, lo - 1)]) + abs1(t[(lo, lo)]);
            if tst == 0.0 {
                if lo >= 2 {
                    tst += t[(lo - 1, lo - 2)].re.abs();
                }
                if lo + 1 <= hi {
                    tst += t[(lo + 1, lo)].re.abs();
                }
            }
            if sub <= ulp * tst {
                let ab = sub.max(abs1(t[(lo - 1, lo)]));
                let ba = sub.min(abs1(t[(lo - 1, lo)]));
                let diff = t[(lo - 1, lo - 1)] - t[(lo, lo)];
                let aa = abs1(t[(lo, lo)]).max(abs1(diff));
                let bb = abs1(t[(lo, lo)]).min(abs1(diff));
                let s = aa + ab;
                if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                    break;
                }
            }
            lo -= 1;
        }
        if lo > 0 {
            t[(lo, lo - 1)] = zero;
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::Numerical(format!("complex QR failed to converge (n = {n})")));
        }
        let shift = if its % 10 == 0 {
            // exceptional shift
            let s = 0.75 * t[(hi, hi - 1)].re.abs();
            t[(hi, hi)] + s
        } else {
            // Wilkinson shift from the trailing 2x2 block
            let a11 = t[(hi - 1, hi - 1)];
            let a12 = t[(hi - 1, hi)];
            let a21 = t[(hi, hi - 1)];
            let a22 = t[(hi, hi)];
            let half = (a11 - a22) * 0.5;
            let disc = (half * half + a12 * a21).sqrt();
            let l1 = a22 - a12 * a21 / (half + disc);
            let l2 = a22 - a12 * a21 / (half - disc);
            let c1 = if (half + disc).norm() > 0.0 { l1 } else { a22 };
            let c2 = if (half - disc).norm() > 0.0 { l2 } else { a22 };
            if (c1 - a22).norm() <= (c2 - a22).norm() {
                c1
            } else {
                c2
            }
        };
        let mut x = t[(lo, lo)] - shift;
        let mut y = t[(lo + 1, lo)];
        for k in lo..hi {
            if k > lo {
                x = t[(k, k - 1)];
                y = t[(k + 1, k - 1)];
            }
            let (c, s) = lartg(x, y);
            let j0 = if k > lo { k - 1 } else { k };
            for j in j0..n {
                let (mut p, mut q) = (t[(k, j)], t[(k + 1, j)]);
                rot(&mut p, &mut q, c, s);
                t[(k, j)] = p;
                t[(k + 1, j)] = q;
            }
            let sc = s.conj();
            let imax = (k + 2).min(hi);
            for i in 0..=imax {
                let (mut p, mut q) = (t[(i, k)], t[(i, k + 1)]);
                rot(&mut p, &mut q, c, sc);
                t[(i, k)] = p;
                t[(i, k + 1)] = q;
            }
            for i in 0..n {
                let (mut p, mut q) = (u[(i, k)], u[(i, k + 1)]);
                rot(&mut p, &mut q, c, sc);
                u[(i, k)] = p;
                u[(i, k + 1)] = q;
            }
            if k > lo {
                t[(k + 1, k - 1)] = zero;
            }
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = zero;
        }
    }
    Ok(ComplexSchur { u, t })
}

/// Complex Givens rotation `[c s; -conj(s) c]` zeroing `g` against `f`.
fn lartg(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    if g == zero {
        return (1.0, zero);
    }
    if f == zero {
        return (0.0, g.conj() / g.norm());
    }
    let fa = f.norm();
    let d = fa.hypot(g.norm());
    (fa / d, (f / fa) * g.conj() / d)
}

/// Applies `x ← c x + s y`, `y ← c y − conj(s) x` elementwise.
#[inline]
fn rot(x: &mut Complex64, y: &mut Complex64, c: f64, s: Complex64) {
    let tx = *x * c + s * *y;
    *y = *y * c - s.conj() * *x;
    *x = tx;
}

/// Swaps diagonal entries `k` and `k+1` of the triangular factor.
fn swap_adjacent(t: &mut CMatrix, u: &mut CMatrix, k: usize) {
    let n = t.nrows();
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    let (c, s) = lartg(t[(k, k + 1)], t22 - t11);
    for j in (k + 2)..n {
        let (mut x, mut y) = (t[(k, j)], t[(k + 1, j)]);
        rot(&mut x, &mut y, c, s);
        t[(k, j)] = x;
        t[(k + 1, j)] = y;
    }
    let sc = s.conj();
    for i in 0..k {
        let (mut x, mut y) = (t[(i, k)], t[(i, k + 1)]);
        rot(&mut x, &mut y, c, sc);
        t[(i, k)] = x;
        t[(i, k + 1)] = y;
    }
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    for i in 0..n {
        let (mut x, mut y) = (u[(i, k)], u[(i, k + 1)]);
        rot(&mut x, &mut y, c, sc);
        u[(i, k)] = x;
        u[(i, k + 1)] = y;
    }
}

/// Converts a real Schur form into a complex one (triangularizing the
/// 2x2 blocks).
fn rsf_to_csf(q: &Matrix, t: &Matrix) -> ComplexSchur {
    let n = t.nrows();
    let mut tc: CMatrix = t.map(|v| Complex64::new(v, 0.0));
    let mut uc: CMatrix = q.map(|v| Complex64::new(v, 0.0));
    let mut m = n;
    while m > 1 {
        m -= 1;
        let sub = tc[(m, m - 1)];
        let scale = tc[(m, m)].norm() + tc[(m - 1, m - 1)].norm();
        if sub.norm() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
            tc[(m, m - 1)] = Complex64::new(0.0, 0.0);
            continue;
        }
        let a = tc[(m - 1, m - 1)];
        let b = tc[(m - 1, m)];
        let d = tc[(m, m)];
        let half_tr = (a + d) * 0.5;
        let disc = ((a - d) * 0.5).powi(2) + b * sub;
        let lambda = half_tr + disc.sqrt();
        let mu = lambda - d;
        let r = mu.norm().hypot(sub.norm());
        let cs = mu / r;
        let sn = sub / r;
        // G = [conj(cs) conj(sn); -sn cs], first row is the eigenvector
        let g = [[cs.conj(), sn.conj()], [-sn, cs]];
        for j in (m - 1)..n {
            let x = tc[(m - 1, j)];
            let y = tc[(m, j)];
            tc[(m - 1, j)] = g[0][0] * x + g[0][1] * y;
            tc[(m, j)] = g[1][0] * x + g[1][1] * y;
        }
        // right-multiply by Gᴴ
        for i in 0..=m {
            let x = tc[(i, m - 1)];
            let y = tc[(i, m)];
            tc[(i, m - 1)] = x * g[0][0].conj() + y * g[0][1].conj();
            tc[(i, m)] = x * g[1][0].conj() + y * g[1][1].conj();
        }
        for i in 0..n {
            let x = uc[(i, m - 1)];
            let y = uc[(i, m)];
            uc[(i, m - 1)] = x * g[0][0].conj() + y * g[0][1].conj();
            uc[(i, m)] = x * g[1][0].conj() + y * g[1][1].conj();
        }
        tc[(m, m - 1)] = Complex64::new(0.0, 0.0);
    }
    for j in 0..n {
        for i in (j + 1)..n {
            tc[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    ComplexSchur { u: uc, t: tc }
}

pub(crate) fn to_complex(a: &Matrix) -> CMatrix {
    a.map(|v| Complex64::new(v, 0.0))
}

pub(crate) fn real_part(a: &CMatrix) -> Matrix {
    a.map(|v| v.re)
}

pub(crate) fn max_abs_imag(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.im.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &ComplexSchur) -> CMatrix {
        &s.u * &s.t * s.u.adjoint()
    }

    #[test]
    fn complex_schur_reconstructs_rotation_generator() {
        let a = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.3, -1.0, 0.0, 0.2, 0.0, 0.0, -2.0]);
        let s = ComplexSchur::new(&a).unwrap();
        let err = (reconstruct(&s) - to_complex(&a)).norm();
        assert!(err < 1e-12, "reconstruction error {err}");
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(s.t[(i, j)].norm(), 0.0);
            }
        }
    }

    #[test]
    fn complex_qr_matches_real_route() {
        let a = Matrix::from_fn(12, 12, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { -2.0 } else { 0.0 });
        let s = complex_qr(&a).unwrap();
        let err = (reconstruct(&s) - to_complex(&a)).norm();
        assert!(err < 1e-10 * a.norm(), "reconstruction error {err}");
        let unit = (s.u.adjoint() * &s.u - CMatrix::identity(12, 12)).norm();
        assert!(unit < 1e-12);
        let mut got: Vec<Complex64> = s.eigenvalues();
        let mut want = ComplexSchur::new(&a).unwrap().eigenvalues();
        let key = |z: &Complex64| (z.re * 1e6).round() as i64 * 1_000_000 + (z.im * 1e3).round() as i64;
        got.sort_by_key(key);
        want.sort_by_key(key);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-8, "{g} vs {w}");
        }
    }

    #[test]
    fn reorder_moves_stable_block_first() {
        let a = Matrix::from_row_slice(
            4,
            4,
            &[1.0, 2.0, 0.0, 1.0, -3.0, 0.5, 1.0, 0.0, 0.0, 0.0, -2.0, 4.0, 1.0, 0.0, -1.0, -0.5],
        );
        let mut s = ComplexSchur::new(&a).unwrap();
        let k = s.reorder(|l| l.re < 0.0);
        let ev = s.eigenvalues();
        for (i, l) in ev.iter().enumerate() {
            assert_eq!(l.re < 0.0, i < k, "eigenvalue ordering broken: {ev:?}");
        }
        let err = (reconstruct(&s) - to_complex(&a)).norm();
        assert!(err < 1e-11, "reconstruction error {err}");
        let unit = (s.u.adjoint() * &s.u - CMatrix::identity(4, 4)).norm();
        assert!(unit < 1e-12);
    }
}
