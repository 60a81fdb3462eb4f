//! Enumeration of pure stabilizer states and quadratic phase states.

pub mod cache;
mod enumerate;
mod quadratic;

pub use enumerate::{
    count_lagrangians, count_stabilizer_states, enumerate_stabilizer_states,
    enumerate_stabilizer_states_with_limit, lagrangian_subspaces, stabilizer_states_iter,
    GenerationMeta, StabEntry, StabilizerDictionary, CONVENTION_VERSION, DEFAULT_MAX_ENTRIES,
};
pub use quadratic::{
    enumerate_quadratic_states, missing_from, QuadraticStateSet, MAX_QUADRATIC_QUBITS,
};
