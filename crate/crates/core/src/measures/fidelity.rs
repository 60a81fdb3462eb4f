use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stabenum::StabilizerDictionary;
use crate::state::{inner, DenseState, DensityMatrix};

/// Eigenvalues at or below this are outside the support of a mixed state.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

/// Overlaps closer than this count as ties and keep the lower index.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DminResult {
    /// `-log₂ fidelity`, in bits.
    pub dmin: f64,
    pub fidelity: f64,
    /// Dictionary index of the best stabilizer state.
    pub argmax: usize,
}

pub(crate) fn check_dict(n: usize, d: usize, dict: &StabilizerDictionary) -> Result<()> {
    if dict.n != n || dict.d != d {
        return Err(Error::DimensionMismatch(format!(
            "state on (n={n}, d={d}) but dictionary for (n={}, d={})",
            dict.n, dict.d
        )));
    }
    if dict.is_empty() {
        return Err(Error::InvalidInput("empty dictionary".into()));
    }
    Ok(())
}

fn best_of(values: &[f64]) -> DminResult {
    let mut argmax = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[argmax] + TIE_TOL {
            argmax = i;
        }
    }
    let fidelity = values[argmax];
    DminResult {
        dmin: -fidelity.log2(),
        fidelity,
        argmax,
    }
}

/// Squared overlaps `|⟨φ_j|ψ⟩|²` in dictionary order.
pub fn stabilizer_overlaps(psi: &DenseState, dict: &StabilizerDictionary) -> Result<Vec<f64>> {
    check_dict(psi.n, psi.d, dict)?;
    Ok(dict
        .entries
        .par_iter()
        .map(|e| inner(&e.state.amps, &psi.amps).norm_sqr())
        .collect())
}

/// `-log₂ max_φ |⟨φ|ψ⟩|²` over the dictionary.
pub fn dmin(psi: &DenseState, dict: &StabilizerDictionary) -> Result<DminResult> {
    Ok(best_of(&stabilizer_overlaps(psi, dict)?))
}

/// `-log₂ max_φ Tr(Π_ρ φ)` with `Π_ρ` the support projector of `ρ`.
pub fn dmin_mixed(rho: &DensityMatrix, dict: &StabilizerDictionary) -> Result<DminResult> {
    check_dict(rho.n, rho.d, dict)?;
    let support = DensityMatrix {
        n: rho.n,
        d: rho.d,
        matrix: rho.support_projector(SUPPORT_CUTOFF),
    };
    let values: Vec<f64> = dict
        .entries
        .par_iter()
        .map(|e| support.expectation(&e.state.amps))
        .collect();
    Ok(best_of(&values))
}

/// `max_φ |⟨φ|ψ⟩|² = 2^{-dmin}`.
pub fn stabilizer_fidelity(psi: &DenseState, dict: &StabilizerDictionary) -> Result<f64> {
    Ok(dmin(psi, dict)?.fidelity)
}
