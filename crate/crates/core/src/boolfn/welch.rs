use super::function::BooleanFunction;
use crate::error::{Error, Result};
use crate::gf2::Gf2m;

/// `x ↦ tr(x^{2^r+3})` on GF(2^n) with `r = (n+1)/2`, for odd `3 ≤ n ≤ 15`.
///
/// Bit `i` of the field element (coefficient of `α^i` in the polynomial
/// basis) is the variable `x_{i+1}`.
pub fn welch_function(n: usize) -> Result<BooleanFunction> {
    if n.is_multiple_of(2) || !(3..=15).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "Welch function needs odd n in 3..=15, got {n}"
        )));
    }
    let field = Gf2m::new(n as u32)?;
    let r = n.div_ceil(2);
    let exponent = (1u64 << r) + 3;
    BooleanFunction::from_fn(n, |x| {
        field.trace_raw(field.pow_raw(x as u32, exponent)) == 1
    })
}
