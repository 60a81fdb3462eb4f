use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fidelity::check_dict;
use crate::error::{Error, Result};
use crate::pauli::{all_paulis, PauliOperator};
use crate::solvers::{solve_lp, solve_lp_from_basis, LinearProgram, LpSolution, LpStatus, LP_TOL};
use crate::stabenum::StabilizerDictionary;
use crate::state::{DensityMatrix, C64, ZERO};

/// Allowed deviation of the density matrix from Hermiticity and unit trace.
const INPUT_TOL: f64 = 1e-9;
/// Dictionaries up to this size go to the simplex in one piece.
const FULL_LP_MAX_STATES: usize = 2000;
/// Dual violation above which a state joins the restricted program.
const CG_PRICING_TOL: f64 = 1e-9;
const CG_MAX_ROUNDS: usize = 500;
/// States added per pricing round.
const CG_BATCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Re,
    Im,
}

/// Constraint system of the free-robustness LP for one dictionary: each
/// row is a real Pauli expectation value, each column a stabilizer state.
#[derive(Debug, Clone)]
pub struct RobustnessProgram {
    pub n: usize,
    pub d: usize,
    rows: Vec<(PauliOperator, Part)>,
    expectations: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PseudoTerm {
    pub index: usize,
    pub coeff: f64,
}

/// One term `coeff · P` of the witness in the Pauli basis. Qubit terms use
/// Hermitian Paulis (real coefficients); qutrit terms use `X^x Z^z`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessTerm {
    pub pauli: String,
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpDiagnostics {
    pub iterations: usize,
    pub duality_gap: f64,
    pub primal_residual: f64,
    pub dual_infeasibility: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Robustness {
    /// Smallest `s` with `ρ = (1+s)σ − sσ'`, `σ, σ'` stabilizer mixtures.
    pub r: f64,
    /// `log₂(1 + R)`.
    pub lr: f64,
    /// Optimal `Σ|c_φ| = 1 + 2R`.
    pub l1: f64,
    pub pseudomixture: Vec<PseudoTerm>,
    pub witness: Vec<WitnessTerm>,
    /// `Tr ρA`, equal to `l1` by strong duality.
    pub witness_value: f64,
    /// `max_φ |Tr φA|` over the dictionary; at most 1 up to tolerance.
    pub witness_max_stab: f64,
    pub lp: LpDiagnostics,
}

fn trace_with(rho: &DMatrix<C64>, op: &PauliOperator) -> C64 {
    op.action_table()
        .into_iter()
        .enumerate()
        .map(|(y, (t, ph))| rho[(y, t)] * ph)
        .sum()
}

impl RobustnessProgram {
    pub fn new(dict: &StabilizerDictionary) -> Result<Self> {
        if dict.is_empty() {
            return Err(Error::InvalidInput("empty dictionary".into()));
        }
        let (n, d) = (dict.n, dict.d);
        let mut rows = Vec::new();
        for p in all_paulis(n, d)? {
            if d == 2 {
                let x: Vec<bool> = p.x.iter().map(|&v| v == 1).collect();
                let z: Vec<bool> = p.z.iter().map(|&v| v == 1).collect();
                rows.push((PauliOperator::hermitian_qubit(&x, &z), Part::Re));
            } else {
                let identity = p.is_identity_up_to_phase();
                rows.push((p.clone(), Part::Re));
                if !identity {
                    rows.push((p, Part::Im));
                }
            }
        }
        // One action table per row: ⟨ψ|P|ψ⟩ = Σ_y conj(ψ_t) · phase · ψ_y.
        let tables: Vec<Vec<(usize, C64)>> = rows.iter().map(|(p, _)| p.action_table()).collect();
        let columns: Vec<Vec<f64>> = dict
            .entries
            .par_iter()
            .map(|e| {
                let amps = &e.state.amps;
                rows.iter()
                    .zip(&tables)
                    .map(|((_, part), table)| {
                        let v: C64 = table
                            .iter()
                            .enumerate()
                            .map(|(y, &(t, ph))| amps[t].conj() * ph * amps[y])
                            .sum();
                        match part {
                            Part::Re => v.re,
                            Part::Im => v.im,
                        }
                    })
                    .collect()
            })
            .collect();
        let expectations = DMatrix::from_fn(rows.len(), dict.len(), |r, j| columns[j][r]);
        Ok(RobustnessProgram {
            n,
            d,
            rows,
            expectations,
        })
    }

    pub fn num_states(&self) -> usize {
        self.expectations.ncols()
    }

    fn rhs(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.rows
            .iter()
            .map(|(p, part)| {
                let v = trace_with(&rho.matrix, p);
                match part {
                    Part::Re => v.re,
                    Part::Im => v.im,
                }
            })
            .collect()
    }

    /// Hermitian operator whose expectation is row `r`.
    fn row_operator(&self, r: usize) -> DMatrix<C64> {
        let (p, part) = &self.rows[r];
        let m = p.to_matrix();
        match part {
            Part::Re if self.d == 2 => m,
            Part::Re => (&m + m.adjoint()) * C64::new(0.5, 0.0),
            Part::Im => (&m - m.adjoint()) * C64::new(0.0, -0.5),
        }
    }

    fn witness_terms(&self, a: &DMatrix<C64>) -> Result<Vec<WitnessTerm>> {
        let dim = a.nrows() as f64;
        let mut terms = Vec::new();
        let basis: Vec<PauliOperator> = if self.d == 2 {
            self.rows.iter().map(|(p, _)| p.clone()).collect()
        } else {
            all_paulis(self.n, self.d)?
        };
        for p in basis {
            let coeff = (p.to_matrix().adjoint() * a).trace() / dim;
            if coeff.norm() > 1e-12 {
                terms.push(WitnessTerm {
                    pauli: p.to_string(),
                    coeff: [coeff.re, coeff.im],
                });
            }
        }
        Ok(terms)
    }

    /// `min Σ(c⁺ + c⁻)` over the states in `cols`, returned in full-dictionary
    /// coordinates (`c⁺_j` at `j`, `c⁻_j` at `k + j`) with diagnostics
    /// measured against every state. `warm` is a feasible basis in the same
    /// coordinates.
    fn restricted_lp(
        &self,
        cols: &[usize],
        b: &[f64],
        warm: Option<&[usize]>,
    ) -> Result<LpSolution> {
        let (m, k, s) = (self.expectations.nrows(), self.num_states(), cols.len());
        let a = DMatrix::from_fn(m, 2 * s, |r, j| {
            if j < s {
                self.expectations[(r, cols[j])]
            } else {
                -self.expectations[(r, cols[j - s])]
            }
        });
        let lp = LinearProgram::new(vec![1.0; 2 * s], a, b.to_vec())?;
        let mut sol = match warm {
            Some(basis) => {
                let mut pos = vec![usize::MAX; k];
                for (i, &c) in cols.iter().enumerate() {
                    pos[c] = i;
                }
                let local: Vec<usize> = basis
                    .iter()
                    .map(|&v| if v < k { pos[v] } else { s + pos[v - k] })
                    .collect();
                solve_lp_from_basis(&lp, &local)?
            }
            None => solve_lp(&lp)?,
        };
        if sol.status != LpStatus::Optimal {
            return Ok(sol);
        }
        let mut primal = vec![0.0; 2 * k];
        for (j, &c) in cols.iter().enumerate() {
            primal[c] = sol.primal[j];
            primal[k + c] = sol.primal[s + j];
        }
        sol.basis = sol
            .basis
            .iter()
            .map(|&v| if v < s { cols[v] } else { k + cols[v - s] })
            .collect();
        let aty = self.expectations.transpose() * DVector::from_column_slice(&sol.dual);
        sol.dual_infeasibility = aty.iter().fold(0.0f64, |w, v| w.max(v.abs() - 1.0));
        sol.primal = primal;
        Ok(sol)
    }

    /// `m` states with linearly independent expectation vectors, taken
    /// greedily in `order`. Prefers well-separated vectors so the starting
    /// basis is well conditioned.
    fn independent_states(&self, order: &[usize]) -> Result<Vec<usize>> {
        let m = self.expectations.nrows();
        let mut chosen = Vec::with_capacity(m);
        let mut q: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut used = vec![false; self.num_states()];
        for threshold in [0.1, 1e-6] {
            for &j in order {
                if chosen.len() == m {
                    return Ok(chosen);
                }
                if used[j] {
                    continue;
                }
                let col = self.expectations.column(j);
                let mut v: DVector<f64> = col.into_owned();
                for _ in 0..2 {
                    for u in &q {
                        let c = u.dot(&v);
                        v.axpy(-c, u, 1.0);
                    }
                }
                let nrm = v.norm();
                if nrm > threshold * col.norm() {
                    used[j] = true;
                    chosen.push(j);
                    q.push(v / nrm);
                }
            }
        }
        if chosen.len() == m {
            Ok(chosen)
        } else {
            Err(Error::Solver(format!(
                "dictionary spans only {} of {m} constraint directions",
                chosen.len()
            )))
        }
    }

    /// Solves over a growing subset of states, adding those whose dual
    /// constraint `|Tr φA| ≤ 1` fails, until the dual is feasible for the
    /// whole dictionary. The restricted optimum is then optimal overall.
    /// Every round restarts from the previous optimal basis.
    fn column_generation(&self, b: &[f64]) -> Result<LpSolution> {
        let (m, k) = (self.expectations.nrows(), self.num_states());
        let score = self.expectations.transpose() * DVector::from_column_slice(b);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| score[j].abs().total_cmp(&score[i].abs()));

        // Any independent set of states is a feasible basis once each state
        // enters with the sign of its coefficient.
        let crash = self.independent_states(&order)?;
        let bmat = self.expectations.select_columns(&crash);
        let x = bmat
            .lu()
            .solve(&DVector::from_column_slice(b))
            .ok_or_else(|| Error::Solver("singular starting basis".into()))?;
        let mut basis: Vec<usize> = crash
            .iter()
            .zip(x.iter())
            .map(|(&j, &v)| if v < 0.0 { k + j } else { j })
            .collect();

        let mut active = vec![false; k];
        let mut cols = Vec::new();
        for &j in crash.iter().chain(order.iter().take(2 * m)) {
            if !active[j] {
                active[j] = true;
                cols.push(j);
            }
        }
        let mut iterations = 0;
        for _ in 0..CG_MAX_ROUNDS {
            let mut sol = self.restricted_lp(&cols, b, Some(&basis))?;
            iterations += sol.iterations;
            sol.iterations = iterations;
            if sol.status != LpStatus::Optimal {
                return Ok(sol);
            }
            let aty = self.expectations.transpose() * DVector::from_column_slice(&sol.dual);
            let mut violated: Vec<(usize, f64)> = (0..k)
                .filter(|&j| !active[j])
                .map(|j| (j, aty[j].abs() - 1.0))
                .filter(|&(_, v)| v > CG_PRICING_TOL)
                .collect();
            if violated.is_empty() {
                return Ok(sol);
            }
            violated.sort_by(|a, b| b.1.total_cmp(&a.1));
            for &(j, _) in violated.iter().take(CG_BATCH) {
                active[j] = true;
                cols.push(j);
            }
            basis = sol.basis;
        }
        Err(Error::Solver(format!(
            "robustness column generation did not settle in {CG_MAX_ROUNDS} rounds"
        )))
    }

    pub fn solve(&self, rho: &DensityMatrix) -> Result<Robustness> {
        if rho.n != self.n || rho.d != self.d {
            return Err(Error::DimensionMismatch(format!(
                "state on (n={}, d={}) but program for (n={}, d={})",
                rho.n, rho.d, self.n, self.d
            )));
        }
        rho.require_hermitian(INPUT_TOL)?;
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > INPUT_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix has trace {tr}"
            )));
        }

        let k = self.num_states();
        let b = self.rhs(rho);
        let sol = if k <= FULL_LP_MAX_STATES {
            self.restricted_lp(&(0..k).collect::<Vec<_>>(), &b, None)?
        } else {
            self.column_generation(&b)?
        };
        if sol.status != LpStatus::Optimal {
            return Err(Error::Solver(format!(
                "robustness LP reported {:?} on a complete dictionary",
                sol.status
            )));
        }

        let pseudomixture: Vec<PseudoTerm> = (0..k)
            .map(|j| PseudoTerm {
                index: j,
                coeff: sol.primal[j] - sol.primal[k + j],
            })
            .filter(|t| t.coeff.abs() > 1e-12)
            .collect();
        let l1 = sol.objective;
        let r = ((l1 - 1.0) / 2.0).max(0.0);

        let y = nalgebra::DVector::from_column_slice(&sol.dual);
        let on_states = self.expectations.transpose() * &y;
        let witness_max_stab = on_states.iter().fold(0.0f64, |w, v| w.max(v.abs()));
        let dim = rho.dim();
        let mut a_mat = DMatrix::<C64>::from_element(dim, dim, ZERO);
        for (row, &yr) in sol.dual.iter().enumerate() {
            if yr != 0.0 {
                a_mat += self.row_operator(row) * C64::new(yr, 0.0);
            }
        }
        let witness_value = (&rho.matrix * &a_mat).trace().re;

        Ok(Robustness {
            r,
            lr: (1.0 + r).log2(),
            l1,
            pseudomixture,
            witness: self.witness_terms(&a_mat)?,
            witness_value,
            witness_max_stab,
            lp: LpDiagnostics {
                iterations: sol.iterations,
                duality_gap: sol.duality_gap(),
                primal_residual: sol.primal_residual,
                dual_infeasibility: sol.dual_infeasibility,
            },
        })
    }
}

/// Free robustness of `ρ` with its optimal pseudomixture and dual witness.
pub fn free_robustness(rho: &DensityMatrix, dict: &StabilizerDictionary) -> Result<Robustness> {
    check_dict(rho.n, rho.d, dict)?;
    RobustnessProgram::new(dict)?.solve(rho)
}

/// Largest entrywise deviation of `Σ c_φ φ` from `ρ`.
pub fn reconstruction_error(
    rho: &DensityMatrix,
    dict: &StabilizerDictionary,
    terms: &[PseudoTerm],
) -> f64 {
    let mut sum = DMatrix::<C64>::zeros(rho.dim(), rho.dim());
    for t in terms {
        sum += dict.entries[t.index].state.density_matrix().matrix * C64::new(t.coeff, 0.0);
    }
    (sum - &rho.matrix)
        .iter()
        .fold(0.0f64, |w, v| w.max(v.norm()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessBoundCheck {
    pub n: usize,
    pub r: f64,
    pub l1: f64,
    /// `√(D(D+1))` with `D = d^n`.
    pub bound: f64,
    /// `bound − (l1 − 1)`; nonnegative when the check passes.
    pub margin: f64,
    pub pass: bool,
}

/// Checks `Σ|c| − 1 ≤ √(D(D+1))`, which implies `R ≤ √(D(D+1))`.
pub fn robustness_bound_check(
    rho: &DensityMatrix,
    dict: &StabilizerDictionary,
) -> Result<RobustnessBoundCheck> {
    let rob = free_robustness(rho, dict)?;
    Ok(robustness_bound_from(rho.n, rho.dim(), &rob))
}

pub fn robustness_bound_from(n: usize, dim: usize, rob: &Robustness) -> RobustnessBoundCheck {
    let dim = dim as f64;
    let bound = (dim * (dim + 1.0)).sqrt();
    let margin = bound - (rob.l1 - 1.0);
    RobustnessBoundCheck {
        n,
        r: rob.r,
        l1: rob.l1,
        bound,
        margin,
        pass: margin >= -LP_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{haar_sample, haar_sample_qudit, sample_rng};
    use crate::measures::golden_state;
    use crate::stabenum::enumerate_stabilizer_states;

    #[test]
    fn stabilizer_and_mixed_states_are_free() {
        let dict = enumerate_stabilizer_states(2, 2).unwrap();
        let prog = RobustnessProgram::new(&dict).unwrap();
        for idx in [0, 13, 59] {
            let rob = prog
                .solve(&dict.entries[idx].state.density_matrix())
                .unwrap();
            assert!(rob.r.abs() < 1e-9);
        }
        let rob = prog
            .solve(&DensityMatrix::maximally_mixed(2, 2).unwrap())
            .unwrap();
        assert!(rob.r.abs() < 1e-9);
    }

    /// Independent oracle: the optimal pseudomixture is supported on a basic
    /// solution of the 4-row system, so scan every 4-subset of the 12 signed
    /// columns and keep the best nonnegative solution.
    fn single_qubit_oracle(rho: &DensityMatrix, dict: &StabilizerDictionary) -> f64 {
        let paulis = ["I", "X", "Y", "Z"].map(|s| s.parse::<PauliOperator>().unwrap());
        let col = |j: usize| -> Vec<f64> {
            let (s, st) = if j < 6 { (1.0, j) } else { (-1.0, j - 6) };
            paulis
                .iter()
                .map(|p| s * p.expectation(&dict.entries[st].state.amps).re)
                .collect()
        };
        let b: Vec<f64> = paulis
            .iter()
            .map(|p| trace_with(&rho.matrix, p).re)
            .collect();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << 12) {
            if mask.count_ones() != 4 {
                continue;
            }
            let idx: Vec<usize> = (0..12).filter(|j| mask >> j & 1 == 1).collect();
            let m = nalgebra::DMatrix::from_fn(4, 4, |r, c| col(idx[c])[r]);
            let Some(x) = m.lu().solve(&nalgebra::DVector::from_column_slice(&b)) else {
                continue;
            };
            if x.iter().all(|&v| v >= -1e-12) {
                best = best.min(x.sum());
            }
        }
        best
    }

    #[test]
    fn golden_state_matches_vertex_oracle() {
        let dict = enumerate_stabilizer_states(1, 2).unwrap();
        let rho = golden_state(1).unwrap().density_matrix();
        let rob = free_robustness(&rho, &dict).unwrap();
        let oracle = single_qubit_oracle(&rho, &dict);
        assert!(
            (rob.l1 - oracle).abs() < 1e-7,
            "lp {} oracle {oracle}",
            rob.l1
        );
        assert!(rob.r <= 6f64.sqrt());
        // Bloch vector (1,1,1)/√3 needs Σ|c| = √3 over the octahedron.
        assert!((rob.l1 - 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn random_single_qubit_states_match_oracle() {
        let dict = enumerate_stabilizer_states(1, 2).unwrap();
        let mut rng = sample_rng(21, 0);
        for _ in 0..10 {
            let rho = haar_sample(1, &mut rng).unwrap().density_matrix();
            let rob = free_robustness(&rho, &dict).unwrap();
            assert!((rob.l1 - single_qubit_oracle(&rho, &dict)).abs() < 1e-7);
        }
    }

    #[test]
    fn certificates_hold_for_random_two_qubit_states() {
        let dict = enumerate_stabilizer_states(2, 2).unwrap();
        let prog = RobustnessProgram::new(&dict).unwrap();
        let mut rng = sample_rng(22, 0);
        for _ in 0..5 {
            let rho = haar_sample(2, &mut rng).unwrap().density_matrix();
            let rob = prog.solve(&rho).unwrap();
            assert!(rob.lp.duality_gap < 1e-8);
            assert!(rob.witness_max_stab <= 1.0 + 1e-8);
            assert!((rob.witness_value - rob.l1).abs() < 1e-8);
            assert!(reconstruction_error(&rho, &dict, &rob.pseudomixture) < 1e-8);
            let l1: f64 = rob.pseudomixture.iter().map(|t| t.coeff.abs()).sum();
            assert!((l1 - (1.0 + 2.0 * rob.r)).abs() < 1e-8);
            assert!(robustness_bound_from(2, 4, &rob).pass);
        }
    }

    #[test]
    fn column_generation_matches_full_program() {
        let dict = enumerate_stabilizer_states(3, 2).unwrap();
        let prog = RobustnessProgram::new(&dict).unwrap();
        let all: Vec<usize> = (0..prog.num_states()).collect();
        let mut rng = sample_rng(23, 0);
        for _ in 0..3 {
            let rho = haar_sample(3, &mut rng).unwrap().density_matrix();
            let b = prog.rhs(&rho);
            let full = prog.restricted_lp(&all, &b, None).unwrap();
            let cg = prog.column_generation(&b).unwrap();
            assert_eq!(cg.status, LpStatus::Optimal);
            assert!(
                (full.objective - cg.objective).abs() < 1e-8,
                "{} vs {}",
                full.objective,
                cg.objective
            );
            assert!(cg.dual_infeasibility < 1e-8);
            assert!(cg.duality_gap() < 1e-8);
        }
    }

    #[test]
    fn witness_terms_rebuild_the_witness() {
        let dict = enumerate_stabilizer_states(1, 2).unwrap();
        let rho = golden_state(1).unwrap().density_matrix();
        let rob = free_robustness(&rho, &dict).unwrap();
        let mut a = DMatrix::<C64>::zeros(2, 2);
        for t in &rob.witness {
            let p: PauliOperator = t.pauli.parse().unwrap();
            assert!(t.coeff[1].abs() < 1e-12);
            a += p.to_matrix() * C64::new(t.coeff[0], 0.0);
        }
        let value = (&rho.matrix * &a).trace().re;
        assert!((value - rob.l1).abs() < 1e-9);
    }

    #[test]
    fn qutrit_program_is_consistent() {
        let dict = enumerate_stabilizer_states(1, 3).unwrap();
        let prog = RobustnessProgram::new(&dict).unwrap();
        let rob = prog.solve(&dict.entries[5].state.density_matrix()).unwrap();
        assert!(rob.r.abs() < 1e-9);
        let mut rng = sample_rng(23, 0);
        for _ in 0..5 {
            let rho = haar_sample_qudit(1, 3, &mut rng).unwrap().density_matrix();
            let rob = prog.solve(&rho).unwrap();
            assert!(rob.lp.duality_gap < 1e-8);
            assert!(rob.witness_max_stab <= 1.0 + 1e-8);
            assert!((rob.witness_value - rob.l1).abs() < 1e-8);
            assert!(reconstruction_error(&rho, &dict, &rob.pseudomixture) < 1e-8);
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        let dict = enumerate_stabilizer_states(1, 2).unwrap();
        let bad =
            DensityMatrix::new(1, 2, DMatrix::from_element(2, 2, C64::new(0.0, 1.0))).unwrap();
        assert!(free_robustness(&bad, &dict).is_err());
        let rho = DensityMatrix::maximally_mixed(2, 2).unwrap();
        assert!(matches!(
            free_robustness(&rho, &dict),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
