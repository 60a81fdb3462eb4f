//! Linear programming and complex basis pursuit.

mod basis_pursuit;
mod lp;

pub use basis_pursuit::{
    solve_basis_pursuit, BasisPursuitProblem, BasisPursuitSolution, BP_GAP_TOL, BP_RESIDUAL_TOL,
};
pub use lp::{
    solve_lp, solve_lp_from_basis, LinearProgram, LpSolution, LpStatus, VarBound, LP_TOL,
};
