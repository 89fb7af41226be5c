//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use mtdc_core::lti::StateSpace;
use mtdc_core::numerics::Matrix;
use mtdc_core::synthesis::GeneralizedPlant;
use nalgebra::dmatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

/// Random Hurwitz matrix: a dense matrix shifted left of its spectral
/// abscissa by at least `margin`.
pub fn random_hurwitz(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> Matrix {
    let m = random_matrix(rng, n, n);
    let abscissa = m.complex_eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let shift = abscissa + margin + rng.random_range(0.0..1.0);
    m - Matrix::identity(n, n) * shift
}

/// Well-conditioned random transform `I + 0.3·M`.
pub fn random_transform(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut t = Matrix::identity(n, n) + random_matrix(rng, n, n) * 0.3;
    while t.clone().lu().determinant().abs() < 0.2 {
        t = Matrix::identity(n, n) + random_matrix(rng, n, n) * 0.3;
    }
    t
}

/// One real or complex pole pair of a modal realization.
#[derive(Debug, Clone, Copy)]
pub enum Mode {
    Real(f64),
    Pair { sigma: f64, omega: f64 },
}

/// Stable system in real modal form plus a dense similar realization.
pub struct ModalSystem {
    pub modes: Vec<Mode>,
    /// Modal-form realization (block diagonal `A`).
    pub modal: StateSpace,
    /// Same transfer function, dense `A`.
    pub dense: StateSpace,
}

/// Random stable modal system with poles between 0.01 and 100 rad/s and
/// damping ratio at least 0.02.
pub fn random_modal(rng: &mut ChaCha8Rng, n: usize, p: usize, m: usize) -> ModalSystem {
    let mut modes = Vec::new();
    let mut a = Matrix::zeros(n, n);
    let mut i = 0;
    while i < n {
        let mag = 10f64.powf(rng.random_range(-2.0..2.0));
        if i + 1 < n && rng.random_bool(0.6) {
            let zeta: f64 = rng.random_range(0.02..0.7);
            let sigma = -zeta * mag;
            let omega = mag * (1.0 - zeta * zeta).sqrt();
            a[(i, i)] = sigma;
            a[(i + 1, i + 1)] = sigma;
            a[(i, i + 1)] = omega;
            a[(i + 1, i)] = -omega;
            modes.push(Mode::Pair { sigma, omega });
            i += 2;
        } else {
            a[(i, i)] = -mag;
            modes.push(Mode::Real(-mag));
            i += 1;
        }
    }
    let b = random_matrix(rng, n, m);
    let c = random_matrix(rng, p, n);
    let d = random_matrix(rng, p, m) * 0.1;
    let t = random_transform(rng, n);
    let ti = t.clone().try_inverse().unwrap();
    let modal = StateSpace::new(a.clone(), b.clone(), c.clone(), d.clone()).unwrap();
    let dense = StateSpace::new(&t * &a * &ti, &t * &b, &c * &ti, d).unwrap();
    ModalSystem { modes, modal, dense }
}

impl ModalSystem {
    /// `G(jω)` evaluated block by block from the modal form.
    pub fn response(&self, w: f64) -> Vec<Vec<Complex64>> {
        let ss = &self.modal;
        let (p, m) = (ss.n_outputs(), ss.n_inputs());
        let s = Complex64::new(0.0, w);
        let mut g: Vec<Vec<Complex64>> =
            (0..p).map(|r| (0..m).map(|c| Complex64::new(ss.d[(r, c)], 0.0)).collect()).collect();
        let mut i = 0;
        for mode in &self.modes {
            match *mode {
                Mode::Real(l) => {
                    let inv = 1.0 / (s - l);
                    for r in 0..p {
                        for c in 0..m {
                            g[r][c] += ss.c[(r, i)] * ss.b[(i, c)] * inv;
                        }
                    }
                    i += 1;
                }
                Mode::Pair { sigma, omega } => {
                    // (sI − [[σ, ω], [−ω, σ]])⁻¹ = [[s−σ, ω], [−ω, s−σ]] / ((s−σ)² + ω²)
                    let z = s - sigma;
                    let det = z * z + omega * omega;
                    let inv = [[z / det, omega / det], [-omega / det, z / det]];
                    for r in 0..p {
                        for c in 0..m {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for (u, row) in inv.iter().enumerate() {
                                for (v, e) in row.iter().enumerate() {
                                    acc += ss.c[(r, i + u)] * e * ss.b[(i + v, c)];
                                }
                            }
                            g[r][c] += acc;
                        }
                    }
                    i += 2;
                }
            }
        }
        g
    }
}

/// Largest singular value of a matrix with at most two columns.
pub fn sigma_max_small(g: &[Vec<Complex64>]) -> f64 {
    let m = g.first().map_or(0, |r| r.len());
    // Gram matrix GᴴG, at most 2×2.
    let gram = |a: usize, b: usize| -> Complex64 { g.iter().map(|row| row[a].conj() * row[b]).sum() };
    match m {
        0 => 0.0,
        1 => gram(0, 0).re.sqrt(),
        2 => {
            let (p, q, r) = (gram(0, 0).re, gram(1, 1).re, gram(0, 1).norm_sqr());
            let tr = p + q;
            let det = p * q - r;
            ((tr + (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0).sqrt()
        }
        _ => panic!("at most two columns"),
    }
}

/// Peak gain over `points` log-spaced frequencies in `[lo, hi]` rad/s.
pub fn grid_peak(sys: &ModalSystem, lo: f64, hi: f64, points: usize) -> f64 {
    let (l0, l1) = (lo.log10(), hi.log10());
    let dc = sigma_max_small(&sys.response(0.0));
    (0..points).fold(dc, |best, i| {
        let w = 10f64.powf(l0 + (l1 - l0) * i as f64 / (points - 1) as f64);
        best.max(sigma_max_small(&sys.response(w)))
    })
}

/// Characteristic-polynomial coefficients `[1, c1, .., cn]` by
/// Faddeev–LeVerrier.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        m = a * &m + Matrix::identity(n, n) * coeffs[k - 1];
        let am = a * &m;
        coeffs.push(-am.trace() / k as f64);
    }
    coeffs
}

/// Polynomial roots by Durand–Kerner iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    // Newton polish on the polynomial itself.
    let deriv: Vec<f64> = coeffs[..n].iter().enumerate().map(|(i, c)| c * (n - i) as f64).collect();
    let eval_d = |z: Complex64| deriv.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    for r in &mut roots {
        for _ in 0..3 {
            let d = eval_d(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

/// Minimum-cost perfect matching of two equal-size point sets
/// (Hungarian algorithm); returns the largest matched distance.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let cost = |i: usize, j: usize| (a[i] - b[j]).norm();
    let inf = f64::INFINITY;
    // Potentials and matching, 1-based with a virtual column 0.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost(p[j] - 1, j - 1)).fold(0.0, f64::max)
}

/// Relative distance between two spectra after optimal matching.
pub fn spectra_match(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = a.iter().map(|l| l.norm()).fold(1.0, f64::max);
    matched_distance(a, b) / scale
}

/// Worst `‖AP + PAᵀ + Q‖_F / max(1, ‖Q‖_F)` over `count` random stable
/// instances with `n ≤ 20`; also checks `P` is symmetric PSD.
pub fn lyapunov_suite(count: usize, seed: u64) -> Result<f64, String> {
    use mtdc_core::numerics::{lyapunov_residual, solve_lyapunov};
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let n = 1 + i % 20;
        let a = random_hurwitz(&mut rng, n, 0.1);
        let b = random_matrix(&mut rng, n, 1 + i % 3);
        let q = &b * b.transpose();
        let p = solve_lyapunov(&a, &q).map_err(|e| format!("instance {i}: {e}"))?;
        let rel = lyapunov_residual(&a, &p, &q) / q.norm().max(1.0);
        worst = worst.max(rel);
        if (&p - p.transpose()).norm() > 1e-10 * p.norm().max(1.0) {
            return Err(format!("instance {i}: P not symmetric"));
        }
        let min_eig = p.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-8 * p.norm().max(1.0) {
            return Err(format!("instance {i}: P has eigenvalue {min_eig:e}"));
        }
    }
    Ok(worst)
}

/// Worst relative ARE residual over `count` random instances with
/// `n ≤ 20`. Half are LQR-type (`R = −BBᵀ`), half H∞-type
/// (`R = γ⁻²B1B1ᵀ − B2B2ᵀ`). Every
/// solution must be PSD and stabilizing.
pub fn are_suite(count: usize, seed: u64) -> Result<f64, String> {
    use mtdc_core::numerics::{are_residual, solve_are};
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let n = 1 + i % 20;
        let a = random_matrix(&mut rng, n, n);
        // Single-input pairs of high order are so weakly controllable that
        // ‖X‖ reaches 1e7 and the residual floor eps·‖X‖²·‖R‖ exceeds any
        // Q-relative tolerance, so at least n/2 inputs are used. H∞-type
        // instances are fully actuated so that γ⁻² = 1e-3 stays above the
        // optimum (below it the stabilizing solution is indefinite).
        let m = if i % 2 == 1 { n } else { (1 + i % 3).max(n / 2) };
        let b2 = random_matrix(&mut rng, n, m) * 0.3 + Matrix::identity(n, m);
        let c = random_matrix(&mut rng, 1 + i % 2, n);
        let q = c.transpose() * &c + Matrix::identity(n, n) * 0.1;
        let mut r = -(&b2 * b2.transpose());
        if i % 2 == 1 {
            let b1 = random_matrix(&mut rng, n, 1);
            r += &b1 * b1.transpose() * 1e-3;
        }
        let x = solve_are(&a, &r, &q).map_err(|e| format!("instance {i} (n = {n}): {e}"))?;
        let rel = are_residual(&a, &r, &q, &x) / q.norm().max(1.0);
        worst = worst.max(rel);
        let min_eig = x.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-8 * x.norm().max(1.0) {
            return Err(format!("instance {i}: X has eigenvalue {min_eig:e}"));
        }
        let cl = &a + &r * &x;
        let abscissa = cl.complex_eigenvalues().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        if abscissa >= -1e-10 {
            return Err(format!("instance {i}: A + RX not Hurwitz ({abscissa:e})"));
        }
    }
    Ok(worst)
}

/// Worst relative gap between `hinf_norm` and a `points`-point
/// frequency-grid peak over `count` random modal systems.
pub fn hinf_suite(count: usize, points: usize, seed: u64) -> Result<f64, String> {
    use mtdc_core::numerics::hinf_norm;
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let n = 2 + i % 7;
        let (p, m) = (1 + i % 2, 1 + (i / 2) % 2);
        let sys = random_modal(&mut rng, n, p, m);
        let norm = hinf_norm(&sys.dense).map_err(|e| format!("system {i}: {e}"))?.gamma;
        let oracle = grid_peak(&sys, 1e-3, 1e3, points);
        if norm < oracle * (1.0 - 1e-5) {
            return Err(format!("system {i}: norm {norm} below grid peak {oracle}"));
        }
        worst = worst.max((norm - oracle).abs() / oracle);
    }
    Ok(worst)
}

/// Worst relative mismatch between a ZOH step of `h` and ten composed
/// steps of `h/10` over `count` random 4×4 systems.
pub fn zoh_semigroup_suite(count: usize, h: f64, seed: u64) -> Result<f64, String> {
    use mtdc_core::numerics::zoh_discretize;
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let a = random_matrix(&mut rng, 4, 4) * 3.0;
        let b = random_matrix(&mut rng, 4, 2);
        let (ad, bd) = zoh_discretize(&a, &b, h).map_err(|e| format!("system {i}: {e}"))?;
        let (a1, b1) = zoh_discretize(&a, &b, h / 10.0).map_err(|e| format!("system {i}: {e}"))?;
        let mut ac = Matrix::identity(4, 4);
        let mut bc = Matrix::zeros(4, 2);
        for _ in 0..10 {
            bc = &a1 * bc + &b1;
            ac = &a1 * ac;
        }
        let err = ((&ad - ac).norm() / ad.norm()).max((&bd - bc).norm() / bd.norm());
        worst = worst.max(err);
    }
    Ok(worst)
}

/// `ẋ = a x + w1 + u`, `z = [x; u]`, `y = x + w2`.
pub fn scalar_plant(a: f64) -> GeneralizedPlant {
    let ss = StateSpace::new(
        dmatrix![a],
        dmatrix![1.0, 0.0, 1.0],
        dmatrix![1.0; 0.0; 1.0],
        dmatrix![0.0, 0.0, 0.0; 0.0, 0.0, 1.0; 0.0, 1.0, 0.0],
    )
    .unwrap()
    .named(&["w1", "w2", "u"], &["x"], &["z1", "z2", "y"])
    .unwrap();
    GeneralizedPlant { ss, n_d: 2, n_u: 1, n_z: 2, n_y: 1, grids: vec![0] }
}

/// Both Riccati equations of the scalar plant reduce to
/// `−k X² + 2aX + 1 = 0`, `k = 1 − γ⁻²`. The stabilizing root is
/// `(a + √(a² + k))/k` (or `−1/2a` at `k = 0`), real when `a² + k > 0`;
/// feasibility also needs `X ≥ 0` and `X² < γ²`.
pub fn scalar_feasible(a: f64, g: f64) -> bool {
    let k = 1.0 - 1.0 / (g * g);
    let disc = a * a + k;
    if disc <= 0.0 {
        return false;
    }
    let x = if k == 0.0 { -0.5 / a } else { (a + disc.sqrt()) / k };
    x.is_finite() && x >= 0.0 && x < g
}

pub fn scalar_gamma_opt(a: f64) -> f64 {
    let (mut lo, mut hi) = (1e-3, 1e3);
    assert!(scalar_feasible(a, hi) && !scalar_feasible(a, lo));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if scalar_feasible(a, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
