//! Generalized Pauli operators, stabilizer tableaux and the MUB partition.

mod mub;
mod operator;
mod tableau;

pub use mub::{mub_partition, MAX_MUB_QUBITS};
pub use operator::{pauli_commutes, PauliOperator};
pub use tableau::{tableau_to_state, StabilizerTableau};

use crate::error::Result;
use crate::state::hilbert_dim;

/// Every operator `X^x Z^z` on `n` sites (trivial phase), in index order
/// `x + d^n·z` with `x`, `z` read LSB-first.
pub fn all_paulis(n: usize, d: usize) -> Result<Vec<PauliOperator>> {
    let dim = hilbert_dim(n, d)?;
    let mut out = Vec::with_capacity(dim * dim);
    for zi in 0..dim {
        for xi in 0..dim {
            let x = (0..n)
                .map(|j| crate::state::digit(xi, j, d) as u8)
                .collect();
            let z = (0..n)
                .map(|j| crate::state::digit(zi, j, d) as u8)
                .collect();
            out.push(PauliOperator::new(d, x, z, 0)?);
        }
    }
    Ok(out)
}
