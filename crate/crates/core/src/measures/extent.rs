use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::fidelity::check_dict;
use crate::error::{Error, Result};
use crate::solvers::{solve_basis_pursuit, BasisPursuitProblem, BasisPursuitSolution, BP_GAP_TOL};
use crate::stabenum::StabilizerDictionary;
use crate::state::{DenseState, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Extent {
    /// `(min Σ|c_φ|)²` over decompositions `ψ = Σ c_φ φ`.
    pub xi: f64,
    /// `log₂ ξ`, in bits.
    pub dmax: f64,
    /// Dual lower bound on `ξ`.
    pub xi_lower: f64,
    pub solution: BasisPursuitSolution,
}

pub fn dictionary_matrix(dict: &StabilizerDictionary) -> DMatrix<C64> {
    let dim = dict.entries[0].state.dim();
    DMatrix::from_fn(dim, dict.len(), |i, j| dict.entries[j].state.amps[i])
}

/// Dictionaries up to this size go to the solver in one piece.
const WORKING_SET_MIN: usize = 2000;
/// Dual violation above which a state joins the working set.
const PRICING_TOL: f64 = 1e-9;
/// States added per pricing round.
const BATCH: usize = 256;
const MAX_ROUNDS: usize = 100;

/// Stabilizer extent of a pure state by complex basis pursuit.
pub fn extent(psi: &DenseState, dict: &StabilizerDictionary) -> Result<Extent> {
    check_dict(psi.n, psi.d, dict)?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("state has norm {norm}")));
    }
    let d = dictionary_matrix(dict);
    let t = DVector::from_column_slice(&psi.amps);
    let solution = if dict.len() <= WORKING_SET_MIN {
        solve_basis_pursuit(&BasisPursuitProblem::new(d, t)?)?
    } else {
        working_set(&d, &t)?
    };
    let xi = solution.l1 * solution.l1;
    Ok(Extent {
        xi,
        dmax: xi.log2(),
        xi_lower: solution.lower_bound * solution.lower_bound,
        solution,
    })
}

/// Basis pursuit over a growing set of states, seeded with the largest
/// overlaps. Each round's dual point is checked against the whole
/// dictionary and the states whose constraint `|⟨φ|ν⟩| ≤ 1` fails join the
/// set. Stops once the dual bound over the whole dictionary meets the
/// primal value, so the certificate covers every state.
fn working_set(d: &DMatrix<C64>, t: &DVector<C64>) -> Result<BasisPursuitSolution> {
    let k = d.ncols();
    let overlaps = d.adjoint() * t;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| overlaps[j].norm().total_cmp(&overlaps[i].norm()));
    let mut active = vec![false; k];
    let mut cols: Vec<usize> = Vec::new();
    let mut seed = (16 * d.nrows()).max(BATCH).min(k);
    let mut iterations = 0;
    for _ in 0..MAX_ROUNDS {
        for &j in &order[..seed] {
            if !active[j] {
                active[j] = true;
                cols.push(j);
            }
        }
        let sub = d.select_columns(&cols);
        let sol = match solve_basis_pursuit(&BasisPursuitProblem::new(sub, t.clone())?) {
            Ok(sol) => sol,
            // The seed does not span the target yet.
            Err(Error::InvalidInput(_)) if seed < k => {
                seed = (2 * seed).min(k);
                continue;
            }
            Err(e) => return Err(e),
        };
        iterations += sol.iterations;
        let nu = DVector::from_column_slice(&sol.dual);
        let corr = d.adjoint() * &nu;
        let worst = corr.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let lower = if worst > 0.0 {
            nu.dotc(t).norm() / worst
        } else {
            0.0
        };
        let mut violated: Vec<(usize, f64)> = (0..k)
            .filter(|&j| !active[j])
            .map(|j| (j, corr[j].norm()))
            .filter(|&(_, v)| v > 1.0 + PRICING_TOL)
            .collect();
        if sol.l1 - lower < BP_GAP_TOL || violated.is_empty() {
            let mut coefficients = vec![C64::new(0.0, 0.0); k];
            for (i, &j) in cols.iter().enumerate() {
                coefficients[j] = sol.coefficients[i];
            }
            let dual = nu.unscale(worst.max(1.0)).iter().copied().collect();
            return Ok(BasisPursuitSolution {
                coefficients,
                lower_bound: lower,
                gap: (sol.l1 - lower).max(0.0),
                iterations,
                dual,
                ..sol
            });
        }
        violated.sort_by(|a, b| b.1.total_cmp(&a.1));
        for &(j, _) in violated.iter().take(BATCH) {
            active[j] = true;
            cols.push(j);
        }
    }
    Err(Error::Solver(format!(
        "extent working set did not settle in {MAX_ROUNDS} rounds"
    )))
}

/// `1 + ξ/ε²`, the approximate stabilizer-rank bound at accuracy `ε`.
pub fn stab_rank_bound(xi: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    Ok(1.0 + xi / (epsilon * epsilon))
}
