//! Triangulated-lattice hypergraph states and cell-decomposition bounds on
//! their magic.

mod decompose;
mod geometry;

pub use decompose::{
    cell_decompose, decomposition_bound, h_invariant, lattice_bound, separable_bound,
    CellDecomposition, DecompositionBound, LatticeBound,
};
pub use geometry::{
    build_lattice_state, Boundary, Lattice, LatticeKind, LatticeState, Phase, Role, Site,
};
