//! Continuous-time state-space models with named channels.

use std::collections::HashMap;
use std::ops::AddAssign;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, CMatrix, Matrix, Spectrum};

mod connect;

pub use connect::Connector;

/// `ẋ = A x + B u`, `y = C x + D u` with channel names.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
    pub inputs: Vec<String>,
    pub states: Vec<String>,
    pub outputs: Vec<String>,
}

fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl StateSpace {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let n = a.nrows();
        let (m, p) = (b.ncols(), c.nrows());
        if a.ncols() != n || b.nrows() != n || c.ncols() != n || d.nrows() != p || d.ncols() != m {
            return Err(Error::Dimension(format!(
                "inconsistent realization: A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        for (name, mat) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if mat.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!("{name} has non-finite entries")));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            inputs: default_names("u", m),
            states: default_names("x", n),
            outputs: default_names("y", p),
        })
    }

    /// Memoryless gain `y = D u`.
    pub fn static_gain(d: Matrix) -> Self {
        let (p, m) = d.shape();
        Self::new(Matrix::zeros(0, 0), Matrix::zeros(0, m), Matrix::zeros(p, 0), d)
            .expect("static gain dimensions are consistent")
    }

    pub fn named<S: AsRef<str>>(mut self, inputs: &[S], states: &[S], outputs: &[S]) -> Result<Self> {
        let conv = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        if inputs.len() != self.n_inputs() || states.len() != self.n_states() || outputs.len() != self.n_outputs()
        {
            return Err(Error::Dimension(format!(
                "name lists ({}, {}, {}) do not match model ({}, {}, {})",
                inputs.len(),
                states.len(),
                outputs.len(),
                self.n_inputs(),
                self.n_states(),
                self.n_outputs()
            )));
        }
        self.inputs = conv(inputs);
        self.states = conv(states);
        self.outputs = conv(outputs);
        Ok(self)
    }

    /// Prepends `prefix.` to every channel name.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for v in [&mut self.inputs, &mut self.states, &mut self.outputs] {
            for s in v.iter_mut() {
                *s = format!("{prefix}.{s}");
            }
        }
        self
    }

    pub fn n_states(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn n_outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|s| s == name)
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|s| s == name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    fn lookup(names: &[String], wanted: &[&str]) -> Result<Vec<usize>> {
        let map: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut idx = Vec::with_capacity(wanted.len());
        let mut missing = Vec::new();
        for w in wanted {
            match map.get(w) {
                Some(&i) => idx.push(i),
                None => missing.push(w.to_string()),
            }
        }
        if missing.is_empty() {
            Ok(idx)
        } else {
            Err(Error::Wiring(missing))
        }
    }

    pub fn input_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        Self::lookup(&self.inputs, names)
    }

    pub fn output_indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        Self::lookup(&self.outputs, names)
    }

    /// Keeps only the listed inputs, in the given order.
    pub fn select_inputs(&self, idx: &[usize]) -> Self {
        let mut s = self.clone();
        s.b = self.b.select_columns(idx);
        s.d = self.d.select_columns(idx);
        s.inputs = idx.iter().map(|&i| self.inputs[i].clone()).collect();
        s
    }

    /// Keeps only the listed outputs, in the given order.
    pub fn select_outputs(&self, idx: &[usize]) -> Self {
        let mut s = self.clone();
        s.c = self.c.select_rows(idx);
        s.d = self.d.select_rows(idx);
        s.outputs = idx.iter().map(|&i| self.outputs[i].clone()).collect();
        s
    }

    /// Block-diagonal concatenation of independent systems.
    pub fn append(systems: &[&StateSpace]) -> Self {
        let n: usize = systems.iter().map(|s| s.n_states()).sum();
        let m: usize = systems.iter().map(|s| s.n_inputs()).sum();
        let p: usize = systems.iter().map(|s| s.n_outputs()).sum();
        let mut out = StateSpace {
            a: Matrix::zeros(n, n),
            b: Matrix::zeros(n, m),
            c: Matrix::zeros(p, n),
            d: Matrix::zeros(p, m),
            inputs: Vec::with_capacity(m),
            states: Vec::with_capacity(n),
            outputs: Vec::with_capacity(p),
        };
        let (mut i, mut j, mut k) = (0, 0, 0);
        for s in systems {
            let (ns, ms, ps) = (s.n_states(), s.n_inputs(), s.n_outputs());
            out.a.view_mut((i, i), (ns, ns)).copy_from(&s.a);
            out.b.view_mut((i, j), (ns, ms)).copy_from(&s.b);
            out.c.view_mut((k, i), (ps, ns)).copy_from(&s.c);
            out.d.view_mut((k, j), (ps, ms)).copy_from(&s.d);
            out.inputs.extend(s.inputs.iter().cloned());
            out.states.extend(s.states.iter().cloned());
            out.outputs.extend(s.outputs.iter().cloned());
            i += ns;
            j += ms;
            k += ps;
        }
        out
    }

    /// Cascade `other ∘ self`: the outputs of `self` drive the inputs of `other`.
    pub fn series(&self, other: &StateSpace) -> Result<Self> {
        if self.n_outputs() != other.n_inputs() {
            return Err(Error::Dimension(format!(
                "series: {} outputs feed {} inputs",
                self.n_outputs(),
                other.n_inputs()
            )));
        }
        let (n1, n2) = (self.n_states(), other.n_states());
        let n = n1 + n2;
        let mut a = Matrix::zeros(n, n);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((n1, 0), (n2, n1)).copy_from(&(&other.b * &self.c));
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = Matrix::zeros(n, self.n_inputs());
        b.view_mut((0, 0), (n1, self.n_inputs())).copy_from(&self.b);
        b.view_mut((n1, 0), (n2, self.n_inputs())).copy_from(&(&other.b * &self.d));
        let mut c = Matrix::zeros(other.n_outputs(), n);
        c.view_mut((0, 0), (other.n_outputs(), n1)).copy_from(&(&other.d * &self.c));
        c.view_mut((0, n1), (other.n_outputs(), n2)).copy_from(&other.c);
        let d = &other.d * &self.d;
        let mut s = StateSpace::new(a, b, c, d)?;
        s.inputs = self.inputs.clone();
        s.outputs = other.outputs.clone();
        s.states = self.states.iter().chain(other.states.iter()).cloned().collect();
        Ok(s)
    }

    /// Lower linear fractional transformation: the last `n_y` outputs of
    /// `self` feed `k`, whose outputs drive the last `n_u` inputs.
    pub fn lower_lft(&self, k: &StateSpace, n_u: usize, n_y: usize) -> Result<Self> {
        let (n, m, p) = (self.n_states(), self.n_inputs(), self.n_outputs());
        if n_u > m || n_y > p || k.n_inputs() != n_y || k.n_outputs() != n_u {
            return Err(Error::Dimension(format!(
                "lft: plant {p}x{m} with {n_y} measurements and {n_u} controls, controller {}x{}",
                k.n_outputs(),
                k.n_inputs()
            )));
        }
        let (m1, p1, nk) = (m - n_u, p - n_y, k.n_states());
        let b1 = self.b.columns(0, m1);
        let b2 = self.b.columns(m1, n_u);
        let c1 = self.c.rows(0, p1);
        let c2 = self.c.rows(p1, n_y);
        let d11 = self.d.view((0, 0), (p1, m1));
        let d12 = self.d.view((0, m1), (p1, n_u));
        let d21 = self.d.view((p1, 0), (n_y, m1));
        let d22 = self.d.view((p1, m1), (n_y, n_u));
        let mm = (Matrix::identity(n_y, n_y) - d22 * &k.d)
            .try_inverse()
            .ok_or_else(|| Error::Numerical("lft: I − D22·Dk is singular".into()))?;
        // y = My·[x; xk] + Ny·w, u = Mu·[x; xk] + Nu·w
        let mut my = Matrix::zeros(n_y, n + nk);
        my.columns_mut(0, n).copy_from(&(&mm * c2));
        my.columns_mut(n, nk).copy_from(&(&mm * d22 * &k.c));
        let ny = &mm * d21;
        let mut mu = &k.d * &my;
        mu.columns_mut(n, nk).add_assign(&k.c);
        let nu = &k.d * &ny;

        let mut a = Matrix::zeros(n + nk, n + nk);
        a.view_mut((0, 0), (n, n)).copy_from(&self.a);
        a.view_mut((n, n), (nk, nk)).copy_from(&k.a);
        let mut top = a.rows_mut(0, n);
        top += b2 * &mu;
        let mut bot = a.rows_mut(n, nk);
        bot += &k.b * &my;
        let mut b = Matrix::zeros(n + nk, m1);
        b.rows_mut(0, n).copy_from(&(b1 + b2 * &nu));
        b.rows_mut(n, nk).copy_from(&(&k.b * &ny));
        let mut c = d12 * &mu;
        c.columns_mut(0, n).add_assign(&c1);
        let d = d11 + d12 * &nu;
        let mut s = StateSpace::new(a, b, c, d)?;
        s.inputs = self.inputs[..m1].to_vec();
        s.outputs = self.outputs[..p1].to_vec();
        s.states = self.states.iter().chain(k.states.iter()).cloned().collect();
        Ok(s)
    }

    /// Multiplies every output by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut s = self.clone();
        s.c *= k;
        s.d *= k;
        s
    }

    /// `G(jω) = C (jωI − A)⁻¹ B + D`.
    pub fn freq_response(&self, w: f64) -> Result<CMatrix> {
        let n = self.n_states();
        let dc = self.d.map(|v| Complex64::new(v, 0.0));
        if n == 0 {
            return Ok(dc);
        }
        let mut m = self.a.map(|v| Complex64::new(-v, 0.0));
        for i in 0..n {
            m[(i, i)] += Complex64::new(0.0, w);
        }
        let b = self.b.map(|v| Complex64::new(v, 0.0));
        let x = m
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Numerical(format!("jωI − A singular at ω = {w}")))?;
        Ok(self.c.map(|v| Complex64::new(v, 0.0)) * x + dc)
    }

    /// Steady-state gain `D − C A⁻¹ B`.
    pub fn dc_gain(&self) -> Result<Matrix> {
        if self.n_states() == 0 {
            return Ok(self.d.clone());
        }
        let x = self
            .a
            .clone()
            .lu()
            .solve(&self.b)
            .ok_or_else(|| Error::Numerical("A is singular, DC gain undefined".into()))?;
        Ok(&self.d - &self.c * x)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        eigenvalues(&self.a)
    }

    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.spectrum()?.is_hurwitz(0.0))
    }

    /// State transformation `x̃ = T x` given `T` and `T⁻¹`.
    pub fn transformed(&self, t: &Matrix, t_inv: &Matrix, states: Vec<String>) -> Self {
        StateSpace {
            a: t * &self.a * t_inv,
            b: t * &self.b,
            c: &self.c * t_inv,
            d: self.d.clone(),
            inputs: self.inputs.clone(),
            states,
            outputs: self.outputs.clone(),
        }
    }
}
