use serde::{Deserialize, Serialize};

use super::operator::{check_dim, pauli_commutes, PauliOperator};
use crate::error::{Error, Result};
use crate::state::{hilbert_dim, DenseState, C64, ZERO};

/// `n` independent, pairwise commuting generators whose group has no
/// nontrivial scalars; it stabilizes exactly one state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StabilizerTableau {
    pub n: usize,
    pub d: usize,
    pub generators: Vec<PauliOperator>,
}

fn inverse_mod(a: u8, d: usize) -> u8 {
    (1..d as u8)
        .find(|&b| (a as usize * b as usize) % d == 1)
        .expect("prime modulus")
}

/// Row-reduces generators in place over their symplectic coordinates,
/// multiplying operators so that phases stay exact. Returns pivot columns.
/// Rows that reduce to a scalar are left at the bottom.
fn reduce_generators(gens: &mut [PauliOperator]) -> Vec<usize> {
    let Some(first) = gens.first() else {
        return Vec::new();
    };
    let (n, d) = (first.n, first.d);
    let coord = |g: &PauliOperator, c: usize| if c < n { g.x[c] } else { g.z[c - n] };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..2 * n {
        if r == gens.len() {
            break;
        }
        let Some(p) = (r..gens.len()).find(|&i| coord(&gens[i], c) != 0) else {
            continue;
        };
        gens.swap(r, p);
        let lead = coord(&gens[r], c);
        if lead != 1 {
            gens[r] = gens[r].pow(inverse_mod(lead, d) as u32);
        }
        for i in 0..gens.len() {
            if i == r {
                continue;
            }
            let v = coord(&gens[i], c);
            if v != 0 {
                let k = (d as u8 - v) as u32;
                gens[i] = gens[i].mul(&gens[r].pow(k)).expect("same space");
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl StabilizerTableau {
    pub fn new(generators: Vec<PauliOperator>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InconsistentTableau("no generators".into()))?;
        let (n, d) = (first.n, first.d);
        check_dim(d)?;
        if generators.iter().any(|g| g.n != n || g.d != d) {
            return Err(Error::DimensionMismatch(
                "generators act on different spaces".into(),
            ));
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !pauli_commutes(a, b)? {
                    return Err(Error::InconsistentTableau(format!(
                        "{a} and {b} do not commute"
                    )));
                }
            }
        }
        for g in &generators {
            if !g.has_order_d() {
                return Err(Error::InconsistentTableau(format!(
                    "group contains a nontrivial scalar ({g}^{d} ≠ 𝟙)"
                )));
            }
        }
        let mut reduced = generators.clone();
        let pivots = reduce_generators(&mut reduced);
        if let Some(g) = reduced[pivots.len()..].iter().find(|g| g.phase != 0) {
            return Err(Error::InconsistentTableau(format!(
                "group contains the scalar {}",
                g.phase_value()
            )));
        }
        if pivots.len() != generators.len() {
            return Err(Error::InconsistentTableau(
                "generators are not independent".into(),
            ));
        }
        if generators.len() != n {
            return Err(Error::InconsistentTableau(format!(
                "{} generators for {n} sites",
                generators.len()
            )));
        }
        Ok(StabilizerTableau { n, d, generators })
    }

    /// Parses one generator per string (see [`PauliOperator::parse`]).
    pub fn from_strings(gens: &[&str], d: usize) -> Result<Self> {
        let ops = gens
            .iter()
            .map(|s| PauliOperator::parse(s, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    /// Reduced row-echelon generators; two tableaux describe the same state
    /// iff their canonical forms are equal.
    pub fn canonical(&self) -> Self {
        let mut gens = self.generators.clone();
        reduce_generators(&mut gens);
        StabilizerTableau {
            n: self.n,
            d: self.d,
            generators: gens,
        }
    }

    /// All `d^n` group elements, with their exact phases.
    pub fn group_elements(&self) -> Vec<PauliOperator> {
        let mut elems = vec![PauliOperator::identity(self.n, self.d)];
        for g in &self.generators {
            let powers: Vec<PauliOperator> = (1..self.d as u32).map(|k| g.pow(k)).collect();
            let mut next = elems.clone();
            for e in &elems {
                for p in &powers {
                    next.push(e.mul(p).expect("same space"));
                }
            }
            elems = next;
        }
        elems
    }

    /// Unique joint +1 eigenstate, with canonical global phase.
    pub fn to_state(&self) -> Result<DenseState> {
        let dim = hilbert_dim(self.n, self.d)?;
        let tables: Vec<Vec<Vec<(usize, C64)>>> = self
            .generators
            .iter()
            .map(|g| {
                (1..self.d as u32)
                    .map(|k| g.pow(k).action_table())
                    .collect()
            })
            .collect();
        let threshold = 0.5 / dim as f64;
        let mut v = vec![ZERO; dim];
        let mut scratch = vec![ZERO; dim];
        for start in 0..dim {
            v.iter_mut().for_each(|a| *a = ZERO);
            v[start] = C64::new(1.0, 0.0);
            for powers in &tables {
                scratch.copy_from_slice(&v);
                for table in powers {
                    for (y, amp) in v.iter().enumerate() {
                        let (t, ph) = table[y];
                        scratch[t] += ph * amp;
                    }
                }
                let inv_d = 1.0 / self.d as f64;
                for (a, s) in v.iter_mut().zip(&scratch) {
                    *a = s * inv_d;
                }
            }
            let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if norm2 > threshold {
                let st = DenseState::new(self.n, self.d, v)?.normalized()?;
                return Ok(st.canonical_phase());
            }
        }
        Err(Error::InconsistentTableau("no joint +1 eigenvector".into()))
    }

    /// Largest `‖P|ψ⟩ − |ψ⟩‖` over generators.
    pub fn eigen_residual(&self, psi: &DenseState) -> f64 {
        self.generators
            .iter()
            .map(|g| {
                let pv = g.apply(&psi.amps);
                pv.iter()
                    .zip(&psi.amps)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// The unique state stabilized by `t`.
pub fn tableau_to_state(t: &StabilizerTableau) -> Result<DenseState> {
    t.to_state()
}
