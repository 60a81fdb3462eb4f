//! Linear algebra over GF(2) and arithmetic in the extension fields GF(2^m).

mod field;
mod matrix;

pub use field::{field_pow, field_trace, FieldElement, Gf2m, MAX_DEGREE, MODULI};
pub use matrix::{gf2_rank, BitMatrix};
