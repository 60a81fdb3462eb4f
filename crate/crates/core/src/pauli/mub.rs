use super::operator::PauliOperator;
use super::tableau::StabilizerTableau;
use crate::error::{Error, Result};
use crate::gf2::Gf2m;

pub const MAX_MUB_QUBITS: usize = 5;

/// Partition of the nonidentity `n`-qubit Paulis (modulo phases) into
/// `2^n + 1` maximal abelian subgroups that pairwise meet only in `𝟙`.
///
/// Subgroup `a ∈ GF(2^n)` is `{(x, M_a x)}` with the symmetric matrix
/// `M_a[i][j] = tr(a·α^i·α^j)`; the extra subgroup is the all-`Z` one.
pub fn mub_partition(n: usize) -> Result<Vec<StabilizerTableau>> {
    if n == 0 || n > MAX_MUB_QUBITS {
        return Err(Error::Unsupported(format!(
            "MUB partition for n={n} (supported 1..={MAX_MUB_QUBITS})"
        )));
    }
    let field = Gf2m::new(n as u32)?;
    let basis: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
    let mut out = Vec::with_capacity((1 << n) + 1);

    // The Z-type subgroup.
    let zgens = (0..n)
        .map(|i| PauliOperator::single_z(n, 2, i, 1))
        .collect();
    out.push(StabilizerTableau::new(zgens)?);

    for a in 0..field.order() {
        let gens = (0..n)
            .map(|i| {
                let x: Vec<bool> = (0..n).map(|k| k == i).collect();
                let z: Vec<bool> = (0..n)
                    .map(|j| {
                        let prod = field.mul_raw(a, field.mul_raw(basis[i], basis[j]));
                        field.trace_raw(prod) == 1
                    })
                    .collect();
                PauliOperator::hermitian_qubit(&x, &z)
            })
            .collect();
        out.push(StabilizerTableau::new(gens)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn check_partition(n: usize) {
        let parts = mub_partition(n).unwrap();
        assert_eq!(parts.len(), (1 << n) + 1);
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        for t in &parts {
            let elems = t.group_elements();
            assert_eq!(elems.len(), 1 << n);
            for e in elems {
                if e.is_identity_up_to_phase() {
                    continue;
                }
                assert!(seen.insert(e.symplectic_vector()), "overlap at {e}");
            }
        }
        assert_eq!(seen.len(), (1 << (2 * n)) - 1);
    }

    #[test]
    fn single_qubit_is_x_y_z() {
        let parts = mub_partition(1).unwrap();
        let names: HashSet<String> = parts.iter().map(|t| t.generators[0].to_string()).collect();
        assert_eq!(
            names,
            ["+X", "+Y", "+Z"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn partitions_cover_exactly() {
        for n in 1..=4 {
            check_partition(n);
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(mub_partition(0).is_err());
        assert!(mub_partition(6).is_err());
    }
}
