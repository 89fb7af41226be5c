use num_complex::Complex64;

use super::{eigenvalues, Matrix};
use crate::error::{Error, Result};
use crate::lti::StateSpace;

/// Peak gain of a stable system and the frequency where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HinfNorm {
    pub gamma: f64,
    /// Peak frequency in rad/s.
    pub omega: f64,
}

const REL_TOL: f64 = 1e-6;
const MAX_ITER: usize = 60;

/// Largest singular value of `G(jω)`.
pub fn sigma_max_at(sys: &StateSpace, w: f64) -> Result<f64> {
    let g = sys.freq_response(w)?;
    if g.nrows() == 0 || g.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(g.singular_values().max())
}

fn sigma_max_real(d: &Matrix) -> f64 {
    if d.nrows() == 0 || d.ncols() == 0 {
        0.0
    } else {
        d.clone().singular_values().max()
    }
}

/// H∞ norm by Hamiltonian imaginary-axis iteration.
///
/// A frequency grid seeds the lower bound; each round tests level
/// `(1 + 2 tol) γ_lb`, collects the imaginary-axis Hamiltonian eigenvalues
/// and raises `γ_lb` to the largest gain at the midpoints of the crossing
/// intervals. The loop ends once no crossing remains.
pub fn hinf_norm(sys: &StateSpace) -> Result<HinfNorm> {
    let n = sys.n_states();
    let d = &sys.d;
    let dnorm = sigma_max_real(d);
    if n == 0 || sys.b.iter().all(|v| *v == 0.0) || sys.c.iter().all(|v| *v == 0.0) {
        return Ok(HinfNorm { gamma: dnorm, omega: f64::INFINITY });
    }
    let spec = eigenvalues(&sys.a)?;
    if !spec.is_hurwitz(0.0) {
        return Err(Error::NotHurwitz(format!(
            "H-infinity norm undefined, max real part {:.3e}",
            spec.max_real()
        )));
    }

    let mut best = HinfNorm { gamma: dnorm, omega: f64::INFINITY };
    let consider = |w: f64, best: &mut HinfNorm| -> Result<()> {
        let s = sigma_max_at(sys, w)?;
        if s > best.gamma {
            *best = HinfNorm { gamma: s, omega: w };
        }
        Ok(())
    };
    consider(0.0, &mut best)?;
    let mags: Vec<f64> = spec.eigenvalues.iter().map(|l| l.norm()).filter(|m| *m > 0.0).collect();
    let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-6);
    let hi = mags.iter().cloned().fold(0.0, f64::max).max(lo);
    for l in &spec.eigenvalues {
        if l.im > 0.0 {
            consider(l.im, &mut best)?;
            // resonance peak of a lightly damped pair sits near sqrt(|λ|² − 2 Re²)
            let wp = (l.norm_sqr() - 2.0 * l.re * l.re).max(0.0).sqrt();
            if wp > 0.0 {
                consider(wp, &mut best)?;
            }
        }
    }
    let (l0, l1) = ((lo / 10.0).log10(), (hi * 10.0).log10());
    let npts = 40;
    for i in 0..npts {
        let w = 10f64.powf(l0 + (l1 - l0) * i as f64 / (npts - 1) as f64);
        consider(w, &mut best)?;
    }

    let bt = sys.b.transpose();
    let dt = d.transpose();
    let m = sys.n_inputs();
    let p = sys.n_outputs();
    for _ in 0..MAX_ITER {
        let gamma = (1.0 + 2.0 * REL_TOL) * best.gamma;
        if gamma == 0.0 {
            break;
        }
        let r = Matrix::identity(m, m) * (gamma * gamma) - &dt * d;
        let r_inv = r
            .clone()
            .cholesky()
            .map(|c| c.inverse())
            .ok_or_else(|| Error::Numerical("γ²I − DᵀD not positive definite".into()))?;
        let ah = &sys.a + &sys.b * &r_inv * &dt * &sys.c;
        let top_right = &sys.b * &r_inv * &bt;
        let bottom_left = -(sys.c.transpose() * (Matrix::identity(p, p) + d * &r_inv * &dt) * &sys.c);
        let mut h = Matrix::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(&ah);
        h.view_mut((0, n), (n, n)).copy_from(&top_right);
        h.view_mut((n, 0), (n, n)).copy_from(&bottom_left);
        h.view_mut((n, n), (n, n)).copy_from(&(-ah.transpose()));
        let hs = eigenvalues(&h)?;
        let scale = h.norm().max(1.0);
        let mut ws: Vec<f64> = hs
            .eigenvalues
            .iter()
            .filter(|l: &&Complex64| l.im >= 0.0 && l.re.abs() <= 1e-8 * scale.max(l.norm()))
            .map(|l| l.im)
            .collect();
        if ws.is_empty() {
            break;
        }
        ws.sort_by(f64::total_cmp);
        ws.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        let prev = best.gamma;
        if ws.len() == 1 {
            consider(ws[0], &mut best)?;
        }
        for pair in ws.windows(2) {
            let mid = if pair[0] > 0.0 { (pair[0] * pair[1]).sqrt() } else { 0.5 * pair[1] };
            consider(mid, &mut best)?;
            consider(0.5 * (pair[0] + pair[1]), &mut best)?;
        }
        if best.gamma <= prev * (1.0 + REL_TOL) {
            break;
        }
    }
    Ok(best)
}
