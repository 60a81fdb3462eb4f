//! Magic monotones of explicit states: min-relative entropy and stabilizer
//! fidelity, stabilizer extent, and free robustness with its dual witness.

mod extent;
mod fidelity;
mod report;
mod robustness;

pub use extent::{dictionary_matrix, extent, stab_rank_bound, Extent};
pub use fidelity::{
    dmin, dmin_mixed, stabilizer_fidelity, stabilizer_overlaps, DminResult, SUPPORT_CUTOFF,
};
pub use report::{
    chain_holds, magic_report, magic_report_mixed, BestStabilizer, BpDiagnostics, MagicReport,
    SolverDiagnostics, Tolerances, CHAIN_TOL,
};
pub use robustness::{
    free_robustness, reconstruction_error, robustness_bound_check, robustness_bound_from,
    LpDiagnostics, PseudoTerm, Robustness, RobustnessBoundCheck, RobustnessProgram, WitnessTerm,
};

use crate::error::Result;
use crate::state::{DenseState, C64};

/// `G^{⊗n}`, where `G` has Bloch vector `(1, 1, 1)/√3`.
pub fn golden_state(n: usize) -> Result<DenseState> {
    let theta = (1.0f64 / 3f64.sqrt()).acos();
    let g = DenseState::new(
        1,
        2,
        vec![
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), std::f64::consts::FRAC_PI_4),
        ],
    )?;
    let mut out = g.clone();
    for _ in 1..n {
        out = out.tensor(&g)?;
    }
    Ok(out)
}
