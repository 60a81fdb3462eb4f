use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, StabilizerTableau};
use crate::state::DenseState;

/// Bumped whenever basis order, phase conventions or canonical form change.
pub const CONVENTION_VERSION: u32 = 1;

/// Default cap on materialized dictionary size.
pub const DEFAULT_MAX_ENTRIES: u128 = 500_000;

/// `d^n ∏_{k=0}^{n-1} (d^{n-k} + 1)`.
pub fn count_stabilizer_states(n: usize, d: usize) -> u128 {
    let d = d as u128;
    let mut count = d.pow(n as u32);
    for k in 0..n {
        count *= d.pow((n - k) as u32) + 1;
    }
    count
}

/// Number of Lagrangian subspaces of `GF(d)^{2n}`, `∏_{k=1}^{n} (d^k + 1)`.
pub fn count_lagrangians(n: usize, d: usize) -> u128 {
    (1..=n as u32).map(|k| (d as u128).pow(k) + 1).product()
}

fn check_supported(n: usize, d: usize) -> Result<()> {
    let ok = match d {
        2 => (1..=5).contains(&n),
        3 => (1..=2).contains(&n),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "stabilizer enumeration for n={n}, d={d} (supported: d=2 n≤5, d=3 n≤2)"
        )))
    }
}

/// All Lagrangian subspaces of `GF(d)^{2n}` as reduced row-echelon bases,
/// coordinates ordered `(x_1..x_n, z_1..z_n)`.
pub fn lagrangian_subspaces(n: usize, d: usize) -> Vec<Vec<Vec<u8>>> {
    let cols = 2 * n;
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(n);
    choose_pivots(n, d, cols, 0, &mut pivots, &mut out);
    out
}

fn choose_pivots(
    n: usize,
    d: usize,
    cols: usize,
    start: usize,
    pivots: &mut Vec<usize>,
    out: &mut Vec<Vec<Vec<u8>>>,
) {
    if pivots.len() == n {
        let mut rows = Vec::with_capacity(n);
        fill_rows(n, d, pivots, &mut rows, out);
        return;
    }
    let remaining = n - pivots.len();
    for p in start..=cols - remaining {
        pivots.push(p);
        choose_pivots(n, d, cols, p + 1, pivots, out);
        pivots.pop();
    }
}

fn symplectic(a: &[u8], b: &[u8], n: usize, d: usize) -> usize {
    let mut s = 0usize;
    for j in 0..n {
        s += a[j] as usize * b[n + j] as usize;
        s += (d - b[j] as usize) * a[n + j] as usize;
    }
    s % d
}

fn fill_rows(
    n: usize,
    d: usize,
    pivots: &[usize],
    rows: &mut Vec<Vec<u8>>,
    out: &mut Vec<Vec<Vec<u8>>>,
) {
    let k = rows.len();
    if k == n {
        out.push(rows.clone());
        return;
    }
    let cols = 2 * n;
    let p = pivots[k];
    let free: Vec<usize> = (p + 1..cols).filter(|c| !pivots.contains(c)).collect();
    let combos = d.pow(free.len() as u32);
    for c in 0..combos {
        let mut row = vec![0u8; cols];
        row[p] = 1;
        let mut rem = c;
        for &f in &free {
            row[f] = (rem % d) as u8;
            rem /= d;
        }
        if rows.iter().all(|r| symplectic(r, &row, n, d) == 0) {
            rows.push(row);
            fill_rows(n, d, pivots, rows, out);
            rows.pop();
        }
    }
}

/// Generators for a Lagrangian basis with character index `chars`
/// (one digit in `0..d` per generator).
fn generators_for(basis: &[Vec<u8>], n: usize, d: usize, chars: usize) -> Vec<PauliOperator> {
    let mut rem = chars;
    basis
        .iter()
        .map(|row| {
            let c = (rem % d) as u8;
            rem /= d;
            let x = row[..n].to_vec();
            let z = row[n..].to_vec();
            if d == 2 {
                let xb: Vec<bool> = x.iter().map(|&v| v == 1).collect();
                let zb: Vec<bool> = z.iter().map(|&v| v == 1).collect();
                let mut op = PauliOperator::hermitian_qubit(&xb, &zb);
                op.phase = (op.phase + 2 * c) % 4;
                op
            } else {
                PauliOperator::new(d, x, z, 2 * c).expect("valid digits")
            }
        })
        .collect()
}

/// One dictionary entry: a canonical tableau and its state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabEntry {
    pub tableau: StabilizerTableau,
    pub state: DenseState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationMeta {
    pub generated_unix: u64,
    pub convention_version: u32,
}

/// Every pure stabilizer state for `(n, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerDictionary {
    pub n: usize,
    pub d: usize,
    pub entries: Vec<StabEntry>,
    pub meta: GenerationMeta,
}

impl StabilizerDictionary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = &DenseState> {
        self.entries.iter().map(|e| &e.state)
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Streams every stabilizer state without materializing the dictionary.
/// The Lagrangian bases are held in memory; states are produced lazily.
pub fn stabilizer_states_iter(
    n: usize,
    d: usize,
) -> Result<impl Iterator<Item = Result<StabEntry>>> {
    check_supported(n, d)?;
    let bases = lagrangian_subspaces(n, d);
    let chars = d.pow(n as u32);
    Ok(bases.into_iter().flat_map(move |basis| {
        (0..chars).map(move |c| {
            let tableau = StabilizerTableau {
                n,
                d,
                generators: generators_for(&basis, n, d, c),
            };
            let state = tableau.to_state()?;
            Ok(StabEntry { tableau, state })
        })
    }))
}

/// Materializes all stabilizer states; errors if the count exceeds
/// [`DEFAULT_MAX_ENTRIES`].
pub fn enumerate_stabilizer_states(n: usize, d: usize) -> Result<StabilizerDictionary> {
    enumerate_stabilizer_states_with_limit(n, d, DEFAULT_MAX_ENTRIES)
}

pub fn enumerate_stabilizer_states_with_limit(
    n: usize,
    d: usize,
    max_entries: u128,
) -> Result<StabilizerDictionary> {
    check_supported(n, d)?;
    let expected = count_stabilizer_states(n, d);
    if expected > max_entries {
        return Err(Error::ResourceLimit(format!(
            "{expected} stabilizer states for n={n}, d={d} exceeds the limit of {max_entries}; \
             use stabilizer_states_iter to stream them"
        )));
    }
    let bases = lagrangian_subspaces(n, d);
    let chars = d.pow(n as u32);
    let entries: Vec<StabEntry> = bases
        .par_iter()
        .flat_map_iter(|basis| {
            (0..chars).map(move |c| {
                let tableau = StabilizerTableau {
                    n,
                    d,
                    generators: generators_for(basis, n, d, c),
                };
                tableau.to_state().map(|state| StabEntry { tableau, state })
            })
        })
        .collect::<Result<_>>()?;
    if entries.len() as u128 != expected {
        return Err(Error::Solver(format!(
            "enumeration produced {} states, expected {expected}",
            entries.len()
        )));
    }
    Ok(StabilizerDictionary {
        n,
        d,
        entries,
        meta: GenerationMeta {
            generated_unix: now_unix(),
            convention_version: CONVENTION_VERSION,
        },
    })
}
