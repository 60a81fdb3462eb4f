//! Magic-state toolkit: stabilizer enumeration, magic monotones, Boolean
//! function bounds, discrete Wigner functions and Pauli-MBQC experiments for
//! small many-body systems.

pub mod boolfn;
pub mod error;
pub mod gf2;
pub mod haar;
pub mod lattice;
pub mod mbqc;
pub mod measures;
pub mod pauli;
pub mod solvers;
pub mod stabenum;
pub mod state;
pub mod wigner;

pub use error::{Error, Result};
