use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::geometry::{LatticeKind, LatticeState};
use crate::boolfn::SparseAnf;
use crate::error::{Error, Result};
use crate::gf2::{gf2_rank, BitMatrix};

/// `f = Σ_i x_{c_i}·q_i + q` with every cubic monomial carrying exactly one
/// center variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDecomposition {
    pub f: SparseAnf,
    pub centers: Vec<usize>,
    pub quadratics: Vec<SparseAnf>,
    pub residual: SparseAnf,
}

impl CellDecomposition {
    /// Checks the invariants and the ANF identity.
    pub fn new(
        f: SparseAnf,
        centers: Vec<usize>,
        quadratics: Vec<SparseAnf>,
        residual: SparseAnf,
    ) -> Result<Self> {
        check_centers(f.n, &centers)?;
        if quadratics.len() != centers.len() {
            return Err(Error::InvalidInput(format!(
                "{} centers but {} quadratics",
                centers.len(),
                quadratics.len()
            )));
        }
        if residual.degree() > 2 || residual.n != f.n {
            return Err(Error::InvalidInput("residual must have degree <= 2".into()));
        }
        let mut sum = residual.clone();
        for (&c, q) in centers.iter().zip(&quadratics) {
            if q.n != f.n || q.degree() > 2 {
                return Err(Error::InvalidInput(format!(
                    "q for center {c} is not quadratic"
                )));
            }
            if let Some(m) = q
                .monomials()
                .find(|m| m.iter().any(|v| centers.contains(v)))
            {
                return Err(Error::InvalidInput(format!(
                    "q for center {c} contains a center variable in {m:?}"
                )));
            }
            sum = sum.add(&q.times_variable(c)?)?;
        }
        if sum != f {
            return Err(Error::InvalidInput(
                "decomposition does not reproduce f".into(),
            ));
        }
        Ok(CellDecomposition {
            f,
            centers,
            quadratics,
            residual,
        })
    }

    pub fn order(&self) -> usize {
        self.centers.len()
    }

    /// Drops center `i`, folding `x_{c_i}·q_i` into the residual. Legal only
    /// when `q_i` is affine.
    pub fn remove_center(&self, i: usize) -> Result<Self> {
        let q = self
            .quadratics
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("no center at position {i}")))?;
        if q.degree() > 1 {
            return Err(Error::InvalidInput(format!(
                "center {} carries cubic terms and cannot be removed",
                self.centers[i]
            )));
        }
        let mut out = self.clone();
        out.residual = out.residual.add(&q.times_variable(self.centers[i])?)?;
        out.centers.remove(i);
        out.quadratics.remove(i);
        Ok(out)
    }
}

fn check_centers(n: usize, centers: &[usize]) -> Result<()> {
    for (k, &c) in centers.iter().enumerate() {
        if c >= n {
            return Err(Error::InvalidInput(format!(
                "center {c} out of range for n={n}"
            )));
        }
        if centers[..k].contains(&c) {
            return Err(Error::InvalidInput(format!("center {c} listed twice")));
        }
    }
    Ok(())
}

/// Splits `f` by the given centers. Every cubic monomial must contain exactly
/// one center; monomials of degree at most 2 go to the residual.
pub fn cell_decompose(f: &SparseAnf, centers: &[usize]) -> Result<CellDecomposition> {
    check_centers(f.n, centers)?;
    let mut quadratics = vec![SparseAnf::zero(f.n); centers.len()];
    let mut residual = SparseAnf::zero(f.n);
    for m in f.monomials() {
        match m.len() {
            0..=2 => residual.toggle(m.clone())?,
            3 => {
                let hits: Vec<usize> = (0..centers.len())
                    .filter(|&i| m.contains(&centers[i]))
                    .collect();
                match hits.as_slice() {
                    [] => {
                        return Err(Error::InvalidInput(format!(
                            "cubic monomial {m:?} contains no center"
                        )))
                    }
                    [i] => {
                        let rest = m.iter().copied().filter(|&v| v != centers[*i]).collect();
                        quadratics[*i].toggle(rest)?;
                    }
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "cubic monomial {m:?} contains more than one center"
                        )))
                    }
                }
            }
            d => {
                return Err(Error::InvalidInput(format!(
                    "monomial {m:?} has degree {d}; only cubic functions decompose"
                )))
            }
        }
    }
    CellDecomposition::new(f.clone(), centers.to_vec(), quadratics, residual)
}

/// Half the GF(2) rank of `Q + Qᵀ` for the quadratic part of `q`.
pub fn h_invariant(q: &SparseAnf) -> Result<usize> {
    if q.degree() > 2 {
        return Err(Error::InvalidInput(format!("{q} is not quadratic")));
    }
    let mut b = BitMatrix::zeros(q.n, q.n);
    for m in q.monomials().filter(|m| m.len() == 2) {
        b.toggle(m[0], m[1]);
        b.toggle(m[1], m[0]);
    }
    Ok(gf2_rank(&b) / 2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionBound {
    pub n: usize,
    pub s: usize,
    /// `h_{q_i}` per center.
    pub h: Vec<usize>,
    /// Number of centers at each `h` value.
    pub h_histogram: BTreeMap<usize, usize>,
    /// Upper bound on the distance from `f` to the quadratic functions.
    pub chi_bound: f64,
    /// Upper bound on the min- and max-relative entropy of magic, in bits.
    pub magic_bound: f64,
}

/// `χ ≤ 2^{n−1} − 2^{n−s−1}∏(1+2^{−h_i})` and
/// `𝔇 ≤ Σ_i (2 − 2·log₂(1+2^{−h_i}))`.
pub fn decomposition_bound(dec: &CellDecomposition) -> Result<DecompositionBound> {
    let n = dec.f.n;
    let s = dec.order();
    let h = dec
        .quadratics
        .iter()
        .map(h_invariant)
        .collect::<Result<Vec<_>>>()?;
    let mut h_histogram = BTreeMap::new();
    for &v in &h {
        *h_histogram.entry(v).or_insert(0) += 1;
    }
    // Sum logs so large lattices do not underflow the product.
    let log_prod: f64 = h
        .iter()
        .map(|&v| (1.0 + 2f64.powi(-(v as i32))).log2())
        .sum();
    let chi_bound = 2f64.powi(n as i32 - 1) - 2f64.powf((n - s) as f64 - 1.0 + log_prod);
    let magic_bound = 2.0 * s as f64 - 2.0 * log_prod;
    Ok(DecompositionBound {
        n,
        s,
        h,
        h_histogram,
        chi_bound,
        magic_bound,
    })
}

/// `(2 − (2/3)·log₂6)·n`, the bound for functions that split into disjoint
/// three-variable cubic blocks.
pub fn separable_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "separable bound needs n >= 3 (got {n})"
        )));
    }
    Ok((2.0 - 2.0 / 3.0 * 6f64.log2()) * n as f64)
}

/// Decomposition of a lattice state along its cells, with the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeBound {
    pub kind: LatticeKind,
    pub n: usize,
    pub decomposition: CellDecomposition,
    pub bound: DecompositionBound,
    pub magic_bound_per_qubit: f64,
    pub separable_reference: f64,
}

pub fn lattice_bound(state: &LatticeState) -> Result<LatticeBound> {
    let decomposition = cell_decompose(&state.anf, &state.lattice.centers())?;
    let bound = decomposition_bound(&decomposition)?;
    let n = state.lattice.n;
    Ok(LatticeBound {
        kind: state.lattice.kind,
        n,
        magic_bound_per_qubit: bound.magic_bound / n as f64,
        separable_reference: separable_bound(n)?,
        decomposition,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{nonquadraticity, phase_state};
    use crate::lattice::{build_lattice_state, Boundary, Lattice, Phase};
    use crate::measures::dmin;
    use crate::stabenum::enumerate_stabilizer_states;
    use proptest::prelude::*;

    fn anf(n: usize, terms: &[&[usize]]) -> SparseAnf {
        SparseAnf::new(n, terms.iter().map(|t| t.to_vec())).unwrap()
    }

    #[test]
    fn single_ccz() {
        let f = anf(3, &[&[0, 1, 2]]);
        let d = cell_decompose(&f, &[0]).unwrap();
        assert_eq!(d.quadratics[0], anf(3, &[&[1, 2]]));
        assert!(d.residual.is_empty());
        let b = decomposition_bound(&d).unwrap();
        assert_eq!(b.h, vec![1]);
        assert!((b.chi_bound - 1.0).abs() < 1e-12);
        assert!((b.magic_bound - (16.0f64 / 9.0).log2()).abs() < 1e-12);
        let chi = nonquadraticity(&f.to_function().unwrap()).unwrap().chi;
        assert_eq!(chi, 1);
    }

    #[test]
    fn decomposition_errors() {
        let f = anf(5, &[&[0, 1, 2], &[2, 3, 4]]);
        assert!(cell_decompose(&f, &[0]).is_err());
        assert!(cell_decompose(&f, &[0, 2]).is_err());
        assert!(cell_decompose(&f, &[1, 3]).is_ok());
        assert!(cell_decompose(&f, &[1, 1]).is_err());
        assert!(cell_decompose(&anf(4, &[&[0, 1, 2, 3]]), &[0]).is_err());
        let bad = CellDecomposition {
            f: anf(4, &[&[0, 1, 2, 3]]),
            centers: vec![0],
            quadratics: vec![anf(4, &[&[1, 2, 3]])],
            residual: SparseAnf::zero(4),
        };
        assert!(decomposition_bound(&bad).is_err());
    }

    #[test]
    fn h_of_cycles() {
        // Oracle: v is in the kernel of the m-cycle adjacency iff
        // v_{i+2} = v_i, so the rank is m − 2 for even m and m − 1 for odd m.
        let cycle = |m: usize| SparseAnf::new(m, (0..m).map(|i| vec![i, (i + 1) % m])).unwrap();
        assert_eq!(h_invariant(&cycle(3)).unwrap(), 1);
        assert_eq!(h_invariant(&cycle(4)).unwrap(), 1);
        assert_eq!(h_invariant(&cycle(6)).unwrap(), 2);
        assert_eq!(h_invariant(&cycle(8)).unwrap(), 3);
        assert_eq!(h_invariant(&anf(4, &[&[0, 1], &[2, 3]])).unwrap(), 2);
        assert_eq!(h_invariant(&anf(4, &[&[0], &[]])).unwrap(), 0);
    }

    #[test]
    fn separable_values() {
        let g = (16.0f64 / 9.0).log2();
        assert!((separable_bound(3).unwrap() - g).abs() < 1e-12);
        assert!((separable_bound(6).unwrap() - 2.0 * g).abs() < 1e-12);
        assert!((separable_bound(30).unwrap() - 8.3007).abs() < 1e-4);
        assert!(separable_bound(2).is_err());
    }

    #[test]
    fn periodic_triangular_cells() {
        for (rows, cols) in [(3, 3), (6, 6), (3, 9)] {
            let l = Lattice::new(LatticeKind::Triangular, rows, cols, Boundary::Periodic).unwrap();
            for phase in [Phase::CczOnly, Phase::LevinGu] {
                let b = lattice_bound(&build_lattice_state(&l, phase).unwrap()).unwrap();
                assert_eq!(3 * b.bound.s, l.n);
                for q in &b.decomposition.quadratics {
                    assert_eq!(q.len(), 6);
                    assert_eq!(q.degree(), 2);
                }
                assert!(b.bound.h.iter().all(|&h| h == 2));
                let per = (2.0 - 2.0 * (1.25f64).log2()) / 3.0;
                assert!((b.magic_bound_per_qubit - per).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn periodic_union_jack_cells() {
        for (rows, cols) in [(2, 2), (3, 3), (2, 4)] {
            let l = Lattice::new(LatticeKind::UnionJack, rows, cols, Boundary::Periodic).unwrap();
            let b = lattice_bound(&build_lattice_state(&l, Phase::CczOnly).unwrap()).unwrap();
            assert_eq!(4 * b.bound.s, l.n);
            assert!(b.decomposition.quadratics.iter().all(|q| q.len() == 8));
            assert!(b.bound.h.iter().all(|&h| h == 3));
            let per = (2.0 - 2.0 * (1.125f64).log2()) / 4.0;
            assert!((b.magic_bound_per_qubit - per).abs() < 1e-12);
        }
    }

    #[test]
    fn open_boundaries_lose_few_centers() {
        for k in 1..=4 {
            let side = 3 * k;
            let open = Lattice::new(LatticeKind::Triangular, side, side, Boundary::Open).unwrap();
            let per =
                Lattice::new(LatticeKind::Triangular, side, side, Boundary::Periodic).unwrap();
            let s_open = open.centers().len() as f64;
            let s_per = per.centers().len() as f64;
            assert!(s_open >= s_per - 2.0 * (open.n as f64).sqrt());
            let uj = Lattice::new(LatticeKind::UnionJack, k + 1, k + 1, Boundary::Open).unwrap();
            let s = uj.centers().len() as f64;
            assert!(s >= uj.n as f64 / 4.0 - (uj.n as f64).sqrt());
            // Clipped cells still decompose.
            for l in [open, uj] {
                lattice_bound(&build_lattice_state(&l, Phase::LevinGu).unwrap()).unwrap();
            }
        }
    }

    #[test]
    fn small_lattices_against_exhaustive_values() {
        let dict = enumerate_stabilizer_states(4, 2).unwrap();
        let l = Lattice::new(LatticeKind::Triangular, 2, 2, Boundary::Open).unwrap();
        for phase in [Phase::CczOnly, Phase::LevinGu] {
            let st = build_lattice_state(&l, phase).unwrap();
            let b = lattice_bound(&st).unwrap();
            assert_eq!(b.decomposition.centers, vec![0, 3]);
            assert!((b.bound.chi_bound - 3.5).abs() < 1e-12);
            let f = st.function().unwrap();
            let chi = nonquadraticity(&f).unwrap().chi;
            assert!(chi as f64 <= b.bound.chi_bound);
            let dm = dmin(&phase_state(&f).unwrap(), &dict).unwrap().dmin;
            assert!(
                dm <= b.bound.magic_bound + 1e-12,
                "{dm} > {}",
                b.bound.magic_bound
            );
        }
    }

    #[test]
    fn six_vertex_open_lattice_chi() {
        let l = Lattice::new(LatticeKind::Triangular, 2, 3, Boundary::Open).unwrap();
        let st = build_lattice_state(&l, Phase::CczOnly).unwrap();
        let b = lattice_bound(&st).unwrap();
        let chi = nonquadraticity(&st.function().unwrap()).unwrap().chi;
        assert!(chi as f64 <= b.bound.chi_bound);
    }

    /// Random legal decomposition on `n` variables with `s` centers.
    fn random_decomposition() -> impl Strategy<Value = CellDecomposition> {
        (4usize..=8)
            .prop_flat_map(|n| (Just(n), 1usize..=(n - 3).min(3)))
            .prop_flat_map(|(n, s)| {
                let pairs = n * (n - 1) / 2;
                (
                    Just(n),
                    Just(s),
                    proptest::collection::vec(proptest::bits::u64::between(0, pairs + n + 1), s),
                    proptest::bits::u64::between(0, pairs + n + 1),
                )
            })
            .prop_map(|(n, s, qbits, rbits)| {
                let centers: Vec<usize> = (0..s).collect();
                let others: Vec<usize> = (s..n).collect();
                let terms_over = |vars: &[usize], bits: u64| {
                    let mut terms: Vec<Vec<usize>> = vec![vec![]];
                    terms.extend(vars.iter().map(|&v| vec![v]));
                    for a in 0..vars.len() {
                        for b in a + 1..vars.len() {
                            terms.push(vec![vars[a], vars[b]]);
                        }
                    }
                    let chosen = terms
                        .into_iter()
                        .enumerate()
                        .filter(|(k, _)| k < &64 && (bits >> k) & 1 == 1)
                        .map(|(_, t)| t);
                    SparseAnf::new(n, chosen).unwrap()
                };
                let quadratics: Vec<SparseAnf> =
                    qbits.iter().map(|&b| terms_over(&others, b)).collect();
                let all: Vec<usize> = (0..n).collect();
                let residual = terms_over(&all, rbits);
                let mut f = residual.clone();
                for (&c, q) in centers.iter().zip(&quadratics) {
                    f = f.add(&q.times_variable(c).unwrap()).unwrap();
                }
                CellDecomposition::new(f, centers, quadratics, residual).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn legal_center_removal_keeps_bound(dec in random_decomposition()) {
            let base = decomposition_bound(&dec).unwrap().magic_bound;
            prop_assert!(base >= -1e-12);
            for i in 0..dec.order() {
                match dec.remove_center(i) {
                    Ok(smaller) => {
                        let b = decomposition_bound(&smaller).unwrap().magic_bound;
                        prop_assert!(b <= base + 1e-12);
                        prop_assert!(base <= b + 1e-12);
                    }
                    Err(_) => prop_assert!(dec.quadratics[i].degree() == 2),
                }
            }
        }

        #[test]
        fn redecomposition_recovers_cubic_part(dec in random_decomposition()) {
            let again = cell_decompose(&dec.f, &dec.centers).unwrap();
            for (a, b) in again.quadratics.iter().zip(&dec.quadratics) {
                let diff = a.add(b).unwrap();
                prop_assert!(diff.degree() <= 1);
                prop_assert_eq!(h_invariant(a).unwrap(), h_invariant(b).unwrap());
            }
        }

        #[test]
        fn bound_dominates_exhaustive_chi(dec in random_decomposition()) {
            prop_assume!(dec.f.n <= 6);
            let b = decomposition_bound(&dec).unwrap();
            let chi = nonquadraticity(&dec.f.to_function().unwrap()).unwrap().chi;
            prop_assert!(chi as f64 <= b.chi_bound + 1e-9, "chi {} > {}", chi, b.chi_bound);
        }
    }
}
