//! Row-vector algebra for writing linearized equations term by term.

use std::ops::{Add, Mul, Neg, Sub};

use crate::lti::StateSpace;
use crate::numerics::Matrix;
use crate::Result;

/// A linear form over the stacked vector `[x; u]`.
#[derive(Debug, Clone)]
pub(crate) struct Lin(Vec<f64>);

impl Add for Lin {
    type Output = Lin;
    fn add(mut self, o: Lin) -> Lin {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

impl Sub for Lin {
    type Output = Lin;
    fn sub(self, o: Lin) -> Lin {
        self + (-o)
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        self * -1.0
    }
}

impl Mul<f64> for Lin {
    type Output = Lin;
    fn mul(mut self, k: f64) -> Lin {
        for a in self.0.iter_mut() {
            *a *= k;
        }
        self
    }
}

impl Mul<Lin> for f64 {
    type Output = Lin;
    fn mul(self, l: Lin) -> Lin {
        l * self
    }
}

/// Collects state equations and outputs of a component model.
pub(crate) struct Builder {
    nx: usize,
    nu: usize,
    rows: Vec<Option<Lin>>,
    outputs: Vec<Lin>,
}

impl Builder {
    pub fn new(nx: usize, nu: usize) -> Self {
        Self { nx, nu, rows: vec![None; nx], outputs: Vec::new() }
    }

    pub fn zero(&self) -> Lin {
        Lin(vec![0.0; self.nx + self.nu])
    }

    pub fn x(&self, i: usize) -> Lin {
        let mut l = self.zero();
        l.0[i] = 1.0;
        l
    }

    pub fn u(&self, i: usize) -> Lin {
        let mut l = self.zero();
        l.0[self.nx + i] = 1.0;
        l
    }

    pub fn deriv(&mut self, i: usize, l: Lin) {
        self.rows[i] = Some(l);
    }

    pub fn output(&mut self, l: Lin) {
        self.outputs.push(l);
    }

    pub fn finish<S: AsRef<str>>(self, inputs: &[S], states: &[S], outputs: &[S]) -> Result<StateSpace> {
        let (nx, nu, ny) = (self.nx, self.nu, self.outputs.len());
        let mut a = Matrix::zeros(nx, nx);
        let mut b = Matrix::zeros(nx, nu);
        for (i, r) in self.rows.iter().enumerate() {
            let r = r.as_ref().expect("every state equation is defined");
            for j in 0..nx {
                a[(i, j)] = r.0[j];
            }
            for j in 0..nu {
                b[(i, j)] = r.0[nx + j];
            }
        }
        let mut c = Matrix::zeros(ny, nx);
        let mut d = Matrix::zeros(ny, nu);
        for (i, r) in self.outputs.iter().enumerate() {
            for j in 0..nx {
                c[(i, j)] = r.0[j];
            }
            for j in 0..nu {
                d[(i, j)] = r.0[nx + j];
            }
        }
        StateSpace::new(a, b, c, d)?.named(inputs, states, outputs)
    }
}
