//! Boolean functions in algebraic normal form, hypergraph states and the
//! second-order nonlinearity (nonquadraticity).

mod chi;
mod function;
mod hypergraph;
mod sparse;
mod welch;

pub use chi::{
    dmin_bound_from_chi, dmin_bound_from_chi_value, nonquadraticity, overlap_from_weight,
    Nonquadraticity, MAX_CHI_VARS,
};
pub use function::{BooleanFunction, MAX_VARS};
pub use hypergraph::{hypergraph_state, phase_state, Hypergraph, MAX_DENSE_QUBITS};
pub use sparse::SparseAnf;
pub use welch::welch_function;
