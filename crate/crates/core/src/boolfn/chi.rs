use super::function::BooleanFunction;
use crate::error::{Error, Result};

/// Largest `n` accepted by the exhaustive RM(2,n) search.
pub const MAX_CHI_VARS: usize = 6;

/// `1 − 2^{1−n}·wt(f ⊕ g)`, the overlap `⟨Ψ_f|Ψ_g⟩` of the two phase states.
pub fn overlap_from_weight(f: &BooleanFunction, g: &BooleanFunction) -> Result<f64> {
    let diff = f.add(g)?;
    let n = f.n() as i32;
    Ok(1.0 - 2f64.powi(1 - n) * diff.weight() as f64)
}

/// Nonquadraticity: minimum distance from `f` to RM(2,n), plus one closest
/// quadratic function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nonquadraticity {
    pub chi: u64,
    pub argmin: BooleanFunction,
}

/// Exhaustive search over all quadratic functions in Gray-code order, one
/// XOR and popcount per codeword. The constant term is handled by taking the
/// smaller of `w` and `2^n − w`.
pub fn nonquadraticity(f: &BooleanFunction) -> Result<Nonquadraticity> {
    let n = f.n();
    if n > MAX_CHI_VARS {
        return Err(Error::ResourceLimit(format!(
            "exhaustive nonquadraticity for n={n} (max {MAX_CHI_VARS}); \
             use an order-s decomposition bound (lattice::decomposition_bound) instead"
        )));
    }
    let size = 1u64 << n;
    let mask = if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    };
    let mut monos: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
    for i in 0..n {
        for j in i + 1..n {
            monos.push((1 << i) | (1 << j));
        }
    }
    let gens: Vec<u64> = monos
        .iter()
        .map(|&m| {
            let g = BooleanFunction::from_monomials(n, [m]).expect("valid monomial");
            g.table_words()[0] & mask
        })
        .collect();

    let mut t = f.table_words()[0] & mask;
    let mut code: u64 = 0;
    let score = |t: u64| {
        let w = t.count_ones() as u64;
        (w.min(size - w), w > size - w)
    };
    let (mut best, mut best_flip) = score(t);
    let mut best_code = 0u64;
    for i in 1u64..(1u64 << monos.len()) {
        let bit = i.trailing_zeros() as usize;
        t ^= gens[bit];
        code ^= 1 << bit;
        let (s, flip) = score(t);
        if s < best {
            best = s;
            best_flip = flip;
            best_code = code;
            if best == 0 {
                break;
            }
        }
    }
    let mut chosen: Vec<u32> = monos
        .iter()
        .enumerate()
        .filter(|(k, _)| (best_code >> k) & 1 == 1)
        .map(|(_, &m)| m)
        .collect();
    if best_flip {
        chosen.push(0);
    }
    Ok(Nonquadraticity {
        chi: best,
        argmin: BooleanFunction::from_monomials(n, chosen)?,
    })
}

/// `−2·log₂(1 − 2^{1−n}·χ)`.
pub fn dmin_bound_from_chi_value(n: usize, chi: u64) -> Result<f64> {
    let half = 2f64.powi(n as i32 - 1);
    if chi as f64 >= half {
        return Err(Error::InvalidInput(format!(
            "χ = {chi} ≥ 2^(n-1) = {half}; the bound is undefined"
        )));
    }
    Ok(-2.0 * (1.0 - chi as f64 / half).log2())
}

/// Upper bound on the min-relative entropy of magic of `Ψ_f` from its
/// distance to the quadratic functions.
pub fn dmin_bound_from_chi(f: &BooleanFunction) -> Result<f64> {
    let chi = nonquadraticity(f)?.chi;
    dmin_bound_from_chi_value(f.n(), chi)
}
