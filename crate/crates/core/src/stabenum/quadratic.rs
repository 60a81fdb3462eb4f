use std::collections::HashSet;

use crate::boolfn::{phase_state, BooleanFunction};
use crate::error::{Error, Result};
use crate::state::DenseState;

pub const MAX_QUADRATIC_QUBITS: usize = 5;

/// Phase states of every Boolean function of degree ≤ 2 (constant and linear
/// terms included), one entry per function.
#[derive(Debug, Clone)]
pub struct QuadraticStateSet {
    pub n: usize,
    pub entries: Vec<(BooleanFunction, DenseState)>,
}

impl QuadraticStateSet {
    /// Entries that differ only by the constant term are the same ray.
    pub fn distinct_rays(&self) -> usize {
        self.entries
            .iter()
            .filter(|(f, _)| !f.monomials().contains(&0))
            .count()
    }
}

pub fn enumerate_quadratic_states(n: usize) -> Result<QuadraticStateSet> {
    if n == 0 || n > MAX_QUADRATIC_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "quadratic states for n={n} (supported 1..={MAX_QUADRATIC_QUBITS})"
        )));
    }
    let mut monos: Vec<u32> = vec![0];
    monos.extend((0..n).map(|i| 1u32 << i));
    for i in 0..n {
        for j in i + 1..n {
            monos.push((1 << i) | (1 << j));
        }
    }
    let entries = (0u64..1 << monos.len())
        .map(|c| {
            let f = BooleanFunction::from_monomials(
                n,
                monos
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| (c >> k) & 1 == 1)
                    .map(|(_, &m)| m),
            )?;
            let s = phase_state(&f)?;
            Ok((f, s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadraticStateSet { n, entries })
}

/// Rounds a canonical-phase state into a hashable key.
pub(crate) fn ray_key(s: &DenseState) -> Vec<(i64, i64)> {
    s.clone()
        .canonical_phase()
        .amps
        .iter()
        .map(|a| ((a.re * 1e8).round() as i64, (a.im * 1e8).round() as i64))
        .collect()
}

/// Number of quadratic-state rays not found in `states` (0 means Q ⊆ STAB).
pub fn missing_from<'a>(
    q: &QuadraticStateSet,
    states: impl IntoIterator<Item = &'a DenseState>,
) -> usize {
    let keys: HashSet<_> = states.into_iter().map(ray_key).collect();
    q.entries
        .iter()
        .filter(|(_, s)| !keys.contains(&ray_key(s)))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabenum::enumerate_stabilizer_states;

    #[test]
    fn single_qubit_quadratics() {
        let q = enumerate_quadratic_states(1).unwrap();
        assert_eq!(q.entries.len(), 4);
        assert_eq!(q.distinct_rays(), 2);
    }

    #[test]
    fn counts_follow_anf_dimension() {
        for n in 1..=4usize {
            let q = enumerate_quadratic_states(n).unwrap();
            assert_eq!(q.entries.len(), 1 << (1 + n + n * (n - 1) / 2));
            assert!(q.entries.iter().all(|(f, _)| f.degree() <= 2));
        }
    }

    #[test]
    fn quadratic_states_are_stabilizer_states() {
        for n in 1..=3 {
            let q = enumerate_quadratic_states(n).unwrap();
            let dict = enumerate_stabilizer_states(n, 2).unwrap();
            assert_eq!(missing_from(&q, dict.states()), 0, "n={n}");
        }
    }

    #[test]
    fn out_of_range() {
        assert!(enumerate_quadratic_states(6).is_err());
    }
}
