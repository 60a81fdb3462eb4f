use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::function::BooleanFunction;
use crate::error::{Error, Result};
use crate::state::{DenseState, C64};

pub const MAX_DENSE_QUBITS: usize = 20;

/// Hypergraph on vertices `0..n`; each hyperedge is a sorted vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::InvalidInput("empty hyperedge".into()));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidInput(format!(
                    "vertex {v} out of range for n={n}"
                )));
            }
            if !seen.insert(e.clone()) {
                return Err(Error::InvalidInput(format!("duplicate hyperedge {e:?}")));
            }
            out.push(e);
        }
        Ok(Hypergraph { n, edges: out })
    }

    /// `f(x) = Σ_e ∏_{v∈e} x_v`.
    pub fn characteristic_function(&self) -> Result<BooleanFunction> {
        BooleanFunction::from_index_sets(self.n, self.edges.iter().map(Vec::as_slice))
    }

    /// The hypergraph of a function's monomials (constant term dropped; it
    /// only contributes a global sign).
    pub fn from_function(f: &BooleanFunction) -> Self {
        let edges = f
            .monomials()
            .iter()
            .filter(|&&m| m != 0)
            .map(|&m| (0..32).filter(|k| (m >> k) & 1 == 1).collect())
            .collect();
        Hypergraph { n: f.n(), edges }
    }
}

/// `2^{-n/2} Σ_x (-1)^{f(x)} |x⟩`.
pub fn phase_state(f: &BooleanFunction) -> Result<DenseState> {
    if f.n() > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "dense state on {} qubits (max {MAX_DENSE_QUBITS})",
            f.n()
        )));
    }
    let dim = 1usize << f.n();
    let a = 1.0 / (dim as f64).sqrt();
    let amps = (0..dim)
        .map(|x| C64::new(if f.eval(x) { -a } else { a }, 0.0))
        .collect();
    DenseState::new(f.n(), 2, amps)
}

/// The hypergraph state `∏_e C^{|e|-1}Z_e |+⟩^{⊗n}`.
pub fn hypergraph_state(h: &Hypergraph) -> Result<DenseState> {
    phase_state(&h.characteristic_function()?)
}
