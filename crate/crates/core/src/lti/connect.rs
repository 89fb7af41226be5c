use std::collections::HashMap;

use super::StateSpace;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Named-signal interconnection of state-space blocks.
///
/// Blocks are appended, internal inputs are driven by weighted sums of
/// block outputs and external inputs, and external outputs are weighted
/// sums of block outputs. Internal inputs left undriven are held at zero.
#[derive(Debug, Default, Clone)]
pub struct Connector {
    blocks: Vec<StateSpace>,
    links: Vec<(String, String, f64)>,
    inputs: Vec<(String, Vec<(String, f64)>)>,
    outputs: Vec<(String, Vec<(String, f64)>)>,
}

impl Connector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, block: StateSpace) -> &mut Self {
        self.blocks.push(block);
        self
    }

    /// Adds `gain · output` to the internal input `to`.
    pub fn link(&mut self, to: &str, from: &str, gain: f64) -> &mut Self {
        self.links.push((to.to_string(), from.to_string(), gain));
        self
    }

    /// Declares an external input feeding the listed internal inputs.
    pub fn input(&mut self, name: &str, targets: &[(&str, f64)]) -> &mut Self {
        self.inputs
            .push((name.to_string(), targets.iter().map(|(s, g)| (s.to_string(), *g)).collect()));
        self
    }

    /// Declares an external output as a weighted sum of block outputs.
    pub fn output(&mut self, name: &str, sources: &[(&str, f64)]) -> &mut Self {
        self.outputs
            .push((name.to_string(), sources.iter().map(|(s, g)| (s.to_string(), *g)).collect()));
        self
    }

    pub fn build(&self) -> Result<StateSpace> {
        let refs: Vec<&StateSpace> = self.blocks.iter().collect();
        let g = StateSpace::append(&refs);
        let mut dup = Vec::new();
        for names in [&g.inputs, &g.outputs, &g.states] {
            let mut seen = HashMap::new();
            for s in names.iter() {
                if seen.insert(s.as_str(), ()).is_some() {
                    dup.push(format!("duplicate `{s}`"));
                }
            }
        }
        if !dup.is_empty() {
            return Err(Error::Wiring(dup));
        }
        let uin: HashMap<&str, usize> = g.inputs.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let yout: HashMap<&str, usize> = g.outputs.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let (n, m, p) = (g.n_states(), g.n_inputs(), g.n_outputs());
        let mut missing = Vec::new();

        let mut k = Matrix::zeros(m, p);
        for (to, from, gain) in &self.links {
            match (uin.get(to.as_str()), yout.get(from.as_str())) {
                (Some(&i), Some(&j)) => k[(i, j)] += gain,
                (a, b) => {
                    if a.is_none() {
                        missing.push(to.clone());
                    }
                    if b.is_none() {
                        missing.push(from.clone());
                    }
                }
            }
        }
        let mut e = Matrix::zeros(m, self.inputs.len());
        for (col, (_, targets)) in self.inputs.iter().enumerate() {
            for (t, gain) in targets {
                match uin.get(t.as_str()) {
                    Some(&i) => e[(i, col)] += gain,
                    None => missing.push(t.clone()),
                }
            }
        }
        let mut pm = Matrix::zeros(self.outputs.len(), p);
        for (row, (_, sources)) in self.outputs.iter().enumerate() {
            for (s, gain) in sources {
                match yout.get(s.as_str()) {
                    Some(&j) => pm[(row, j)] += gain,
                    None => missing.push(s.clone()),
                }
            }
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::Wiring(missing));
        }

        // y = M (C x + D E w), M = (I − D K)⁻¹
        let i_dk = Matrix::identity(p, p) - &g.d * &k;
        let mmat = i_dk
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("algebraic loop is singular".into()))?;
        let mc = &mmat * &g.c;
        let mde = &mmat * &g.d * &e;
        let bk = &g.b * &k;
        let a = &g.a + &bk * &mc;
        let b = &bk * &mde + &g.b * &e;
        let c = &pm * &mc;
        let d = &pm * &mde;
        let mut out = StateSpace::new(a, b, c, d)?;
        debug_assert_eq!(out.n_states(), n);
        out.states = g.states.clone();
        out.inputs = self.inputs.iter().map(|(s, _)| s.clone()).collect();
        out.outputs = self.outputs.iter().map(|(s, _)| s.clone()).collect();
        Ok(out)
    }
}
