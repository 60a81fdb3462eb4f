use serde::{Deserialize, Serialize};

use super::{
    dmin, dmin_mixed, extent, free_robustness, DminResult, LpDiagnostics, PseudoTerm, WitnessTerm,
    SUPPORT_CUTOFF,
};
use crate::error::Result;
use crate::solvers::{BP_GAP_TOL, BP_RESIDUAL_TOL, LP_TOL};
use crate::stabenum::StabilizerDictionary;
use crate::state::{DenseState, DensityMatrix};

/// Slack allowed in `dmin ≤ dmax ≤ lr`.
pub const CHAIN_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub lp: f64,
    pub bp_residual: f64,
    pub bp_gap: f64,
    pub support_cutoff: f64,
    pub chain: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lp: LP_TOL,
            bp_residual: BP_RESIDUAL_TOL,
            bp_gap: BP_GAP_TOL,
            support_cutoff: SUPPORT_CUTOFF,
            chain: CHAIN_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestStabilizer {
    pub index: usize,
    pub generators: Vec<String>,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BpDiagnostics {
    pub iterations: usize,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub lp: LpDiagnostics,
    pub basis_pursuit: Option<BpDiagnostics>,
}

/// All measures of one state against one dictionary. `dmax` and `xi` are
/// only computed for pure input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MagicReport {
    pub n: usize,
    pub d: usize,
    pub dmin: f64,
    pub dmax: Option<f64>,
    pub xi: Option<f64>,
    pub lr: f64,
    pub r: f64,
    pub best_stabilizer: BestStabilizer,
    pub pseudomixture: Vec<PseudoTerm>,
    pub witness: Vec<WitnessTerm>,
    pub diagnostics: SolverDiagnostics,
    pub tolerances: Tolerances,
    /// Whether `dmin ≤ dmax ≤ lr` held within `tolerances.chain`.
    pub chain_ok: bool,
}

fn best(dict: &StabilizerDictionary, r: &DminResult) -> BestStabilizer {
    BestStabilizer {
        index: r.argmax,
        generators: dict.entries[r.argmax]
            .tableau
            .generators
            .iter()
            .map(|g| g.to_string())
            .collect(),
        fidelity: r.fidelity,
    }
}

pub fn chain_holds(dmin: f64, dmax: Option<f64>, lr: f64, tol: f64) -> bool {
    match dmax {
        Some(dm) => dmin <= dm + tol && dm <= lr + tol,
        None => dmin <= lr + tol,
    }
}

pub fn magic_report(psi: &DenseState, dict: &StabilizerDictionary) -> Result<MagicReport> {
    let dm = dmin(psi, dict)?;
    let ext = extent(psi, dict)?;
    let rob = free_robustness(&psi.density_matrix(), dict)?;
    let tolerances = Tolerances::default();
    Ok(MagicReport {
        n: psi.n,
        d: psi.d,
        dmin: dm.dmin,
        dmax: Some(ext.dmax),
        xi: Some(ext.xi),
        lr: rob.lr,
        r: rob.r,
        best_stabilizer: best(dict, &dm),
        chain_ok: chain_holds(dm.dmin, Some(ext.dmax), rob.lr, tolerances.chain),
        pseudomixture: rob.pseudomixture,
        witness: rob.witness,
        diagnostics: SolverDiagnostics {
            lp: rob.lp,
            basis_pursuit: Some(BpDiagnostics {
                iterations: ext.solution.iterations,
                gap: ext.solution.gap,
                primal_residual: ext.solution.primal_residual,
                dual_residual: ext.solution.dual_residual,
            }),
        },
        tolerances,
    })
}

pub fn magic_report_mixed(rho: &DensityMatrix, dict: &StabilizerDictionary) -> Result<MagicReport> {
    let dm = dmin_mixed(rho, dict)?;
    let rob = free_robustness(rho, dict)?;
    let tolerances = Tolerances::default();
    Ok(MagicReport {
        n: rho.n,
        d: rho.d,
        dmin: dm.dmin,
        dmax: None,
        xi: None,
        lr: rob.lr,
        r: rob.r,
        best_stabilizer: best(dict, &dm),
        chain_ok: chain_holds(dm.dmin, None, rob.lr, tolerances.chain),
        pseudomixture: rob.pseudomixture,
        witness: rob.witness,
        diagnostics: SolverDiagnostics {
            lp: rob.lp,
            basis_pursuit: None,
        },
        tolerances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{haar_sample, sample_rng};
    use crate::measures::golden_state;
    use crate::stabenum::enumerate_stabilizer_states;

    #[test]
    fn golden_report_and_json() {
        let dict = enumerate_stabilizer_states(1, 2).unwrap();
        let rep = magic_report(&golden_state(1).unwrap(), &dict).unwrap();
        let g = (3.0 - 3f64.sqrt()).log2();
        assert!((rep.dmin - g).abs() < 1e-12);
        assert!((rep.dmax.unwrap() - g).abs() < 1e-5);
        assert!(rep.chain_ok);
        let json = serde_json::to_value(&rep).unwrap();
        assert!(json["tolerances"]["lp"].as_f64().unwrap() > 0.0);
        assert!(!json["witness"].as_array().unwrap().is_empty());
    }

    #[test]
    fn chain_holds_on_random_states() {
        let mut rng = sample_rng(31, 0);
        for n in 1..=2 {
            let dict = enumerate_stabilizer_states(n, 2).unwrap();
            for _ in 0..5 {
                let psi = haar_sample(n, &mut rng).unwrap();
                let rep = magic_report(&psi, &dict).unwrap();
                assert!(
                    rep.chain_ok,
                    "n={n}: {} {:?} {}",
                    rep.dmin, rep.dmax, rep.lr
                );
            }
        }
    }

    #[test]
    fn mixed_report_skips_extent() {
        let dict = enumerate_stabilizer_states(1, 2).unwrap();
        let g = golden_state(1).unwrap().density_matrix();
        let mixed = DensityMatrix::new(
            1,
            2,
            (g.matrix * crate::state::C64::new(0.5, 0.0))
                + DensityMatrix::maximally_mixed(1, 2).unwrap().matrix
                    * crate::state::C64::new(0.5, 0.0),
        )
        .unwrap();
        let rep = magic_report_mixed(&mixed, &dict).unwrap();
        assert!(rep.dmax.is_none());
        // Full-rank input: the support projector is the identity.
        assert!(rep.dmin.abs() < 1e-9);
        assert!(rep.chain_ok);
    }
}
