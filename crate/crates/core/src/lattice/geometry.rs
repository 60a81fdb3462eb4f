use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::boolfn::{phase_state, BooleanFunction, Hypergraph, SparseAnf};
use crate::error::{Error, Result};
use crate::state::DenseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Triangular,
    UnionJack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    /// One CCZ per triangle.
    CczOnly,
    /// CCZ per triangle, CZ per edge and Z per vertex.
    LevinGu,
}

/// Position of a vertex in its cell: the cell center or a shared boundary
/// vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Center,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub index: usize,
    pub row: usize,
    pub col: usize,
    /// Triangular: `(row − col) mod 3`, with 0 the centers. Union Jack: 0 for
    /// centers (odd, odd), 1 for corners (even, even), 2 for edge midpoints.
    pub sublattice: u8,
    pub role: Role,
}

/// A 2D triangulated lattice.
///
/// Triangular: `rows × cols` vertices at index `row·cols + col`, with
/// neighbors `(r, c±1)`, `(r±1, c)`, `(r−1, c+1)`, `(r+1, c−1)`. The cells are
/// the hexagons around sublattice-0 vertices, so periodic lattices need both
/// sides divisible by 3.
///
/// Union Jack: `rows × cols` counts 3×3-vertex cells. The vertex grid is
/// `2·rows × 2·cols` when periodic and `(2·rows+1) × (2·cols+1)` when open,
/// at index `row·width + col`. Each cell center `(2i+1, 2j+1)` is joined to
/// the 8 vertices around it, and consecutive ring vertices close a triangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub rows: usize,
    pub cols: usize,
    pub boundary: Boundary,
    pub n: usize,
    pub sites: Vec<Site>,
    pub triangles: Vec<[usize; 3]>,
}

impl Lattice {
    pub fn new(kind: LatticeKind, rows: usize, cols: usize, boundary: Boundary) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidInput(format!(
                "lattice needs rows, cols >= 2 (got {rows} x {cols})"
            )));
        }
        let lattice = match kind {
            LatticeKind::Triangular => triangular(rows, cols, boundary)?,
            LatticeKind::UnionJack => union_jack(rows, cols, boundary),
        };
        lattice.validate()?;
        Ok(lattice)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for t in &self.triangles {
            if t.iter().any(|&v| v >= self.n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidInput(format!("degenerate triangle {t:?}")));
            }
            let mut key = *t;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(Error::InvalidInput(format!(
                    "triangle {key:?} repeats; the lattice is too small to wrap"
                )));
            }
        }
        Ok(())
    }

    /// Cell centers in index order.
    pub fn centers(&self) -> Vec<usize> {
        self.sites
            .iter()
            .filter(|s| s.role == Role::Center)
            .map(|s| s.index)
            .collect()
    }

    /// Distinct triangle edges, sorted.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut out = BTreeSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                out.insert([a.min(b), a.max(b)]);
            }
        }
        out.into_iter().collect()
    }
}

fn triangular(rows: usize, cols: usize, boundary: Boundary) -> Result<Lattice> {
    let periodic = boundary == Boundary::Periodic;
    if periodic && (!rows.is_multiple_of(3) || !cols.is_multiple_of(3)) {
        return Err(Error::InvalidInput(format!(
            "periodic triangular lattice needs rows and cols divisible by 3 \
             for complete hexagon cells (got {rows} x {cols})"
        )));
    }
    let idx = |r: usize, c: usize| (r % rows) * cols + (c % cols);
    let sites = (0..rows * cols)
        .map(|i| {
            let (row, col) = (i / cols, i % cols);
            let sublattice = ((row + 3 * cols - col) % 3) as u8;
            Site {
                index: i,
                row,
                col,
                sublattice,
                role: if sublattice == 0 {
                    Role::Center
                } else {
                    Role::Boundary
                },
            }
        })
        .collect();
    let (rmax, cmax) = if periodic {
        (rows, cols)
    } else {
        (rows - 1, cols - 1)
    };
    let mut triangles = Vec::with_capacity(2 * rmax * cmax);
    for r in 0..rmax {
        for c in 0..cmax {
            triangles.push([idx(r, c), idx(r, c + 1), idx(r + 1, c)]);
            triangles.push([idx(r, c + 1), idx(r + 1, c + 1), idx(r + 1, c)]);
        }
    }
    Ok(Lattice {
        kind: LatticeKind::Triangular,
        rows,
        cols,
        boundary,
        n: rows * cols,
        sites,
        triangles,
    })
}

fn union_jack(rows: usize, cols: usize, boundary: Boundary) -> Lattice {
    let periodic = boundary == Boundary::Periodic;
    let (h, w) = if periodic {
        (2 * rows, 2 * cols)
    } else {
        (2 * rows + 1, 2 * cols + 1)
    };
    let idx = |r: usize, c: usize| (r % h) * w + (c % w);
    let sites = (0..h * w)
        .map(|i| {
            let (row, col) = (i / w, i % w);
            let sublattice = match (row % 2, col % 2) {
                (1, 1) => 0,
                (0, 0) => 1,
                _ => 2,
            };
            Site {
                index: i,
                row,
                col,
                sublattice,
                role: if sublattice == 0 {
                    Role::Center
                } else {
                    Role::Boundary
                },
            }
        })
        .collect();
    let mut triangles = Vec::with_capacity(8 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let (r, c) = (2 * i, 2 * j);
            let ring = [
                (r, c),
                (r + 1, c),
                (r + 2, c),
                (r + 2, c + 1),
                (r + 2, c + 2),
                (r + 1, c + 2),
                (r, c + 2),
                (r, c + 1),
            ];
            let center = idx(r + 1, c + 1);
            for k in 0..8 {
                let (a, b) = (ring[k], ring[(k + 1) % 8]);
                triangles.push([center, idx(a.0, a.1), idx(b.0, b.1)]);
            }
        }
    }
    Lattice {
        kind: LatticeKind::UnionJack,
        rows,
        cols,
        boundary,
        n: h * w,
        sites,
        triangles,
    }
}

/// A lattice hypergraph state and its characteristic function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeState {
    pub lattice: Lattice,
    pub phase: Phase,
    pub hypergraph: Hypergraph,
    pub anf: SparseAnf,
}

impl LatticeState {
    /// The characteristic function as a truth table (small `n` only).
    pub fn function(&self) -> Result<BooleanFunction> {
        self.anf.to_function()
    }

    /// Dense amplitudes (small `n` only).
    pub fn state(&self) -> Result<DenseState> {
        phase_state(&self.function()?)
    }
}

pub fn build_lattice_state(lattice: &Lattice, phase: Phase) -> Result<LatticeState> {
    let mut edges: Vec<Vec<usize>> = lattice.triangles.iter().map(|t| t.to_vec()).collect();
    if phase == Phase::LevinGu {
        edges.extend(lattice.edges().iter().map(|e| e.to_vec()));
        edges.extend((0..lattice.n).map(|v| vec![v]));
    }
    let hypergraph = Hypergraph::new(lattice.n, edges)?;
    let anf = SparseAnf::new(lattice.n, hypergraph.edges.iter().cloned())?;
    Ok(LatticeState {
        lattice: lattice.clone(),
        phase,
        hypergraph,
        anf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_open_triangular() {
        let l = Lattice::new(LatticeKind::Triangular, 2, 2, Boundary::Open).unwrap();
        assert_eq!(l.n, 4);
        assert_eq!(l.triangles, vec![[0, 1, 2], [1, 3, 2]]);
        assert_eq!(l.centers(), vec![0, 3]);
        assert_eq!(l.edges().len(), 5);
    }

    #[test]
    fn every_triangle_has_one_center() {
        for (kind, r, c, b) in [
            (LatticeKind::Triangular, 3, 3, Boundary::Periodic),
            (LatticeKind::Triangular, 6, 9, Boundary::Periodic),
            (LatticeKind::Triangular, 4, 5, Boundary::Open),
            (LatticeKind::UnionJack, 2, 2, Boundary::Periodic),
            (LatticeKind::UnionJack, 3, 2, Boundary::Open),
        ] {
            let l = Lattice::new(kind, r, c, b).unwrap();
            for t in &l.triangles {
                let k = t
                    .iter()
                    .filter(|&&v| l.sites[v].role == Role::Center)
                    .count();
                assert_eq!(k, 1, "{kind:?} {t:?}");
            }
        }
    }

    #[test]
    fn periodic_vertex_degrees() {
        let tri = Lattice::new(LatticeKind::Triangular, 6, 6, Boundary::Periodic).unwrap();
        let mut deg = vec![0; tri.n];
        for e in tri.edges() {
            deg[e[0]] += 1;
            deg[e[1]] += 1;
        }
        assert!(deg.iter().all(|&d| d == 6));
        assert_eq!(tri.triangles.len(), 2 * tri.n);

        let uj = Lattice::new(LatticeKind::UnionJack, 3, 3, Boundary::Periodic).unwrap();
        assert_eq!(uj.n, 36);
        let mut deg = vec![0; uj.n];
        for e in uj.edges() {
            deg[e[0]] += 1;
            deg[e[1]] += 1;
        }
        for s in &uj.sites {
            let expected = if s.sublattice == 2 { 4 } else { 8 };
            assert_eq!(deg[s.index], expected);
        }
    }

    #[test]
    fn invalid_shapes_rejected() {
        assert!(Lattice::new(LatticeKind::Triangular, 1, 4, Boundary::Open).is_err());
        assert!(Lattice::new(LatticeKind::Triangular, 4, 3, Boundary::Periodic).is_err());
        assert!(Lattice::new(LatticeKind::UnionJack, 2, 1, Boundary::Periodic).is_err());
    }

    #[test]
    fn levin_gu_adds_only_low_degree_terms() {
        let l = Lattice::new(LatticeKind::Triangular, 3, 3, Boundary::Periodic).unwrap();
        let a = build_lattice_state(&l, Phase::CczOnly).unwrap();
        let b = build_lattice_state(&l, Phase::LevinGu).unwrap();
        let diff = a.anf.add(&b.anf).unwrap();
        assert!(diff.degree() <= 2);
        assert_eq!(diff.len(), l.edges().len() + l.n);
        assert!(a.hypergraph.edges.iter().all(|e| e.len() == 3));
    }

    #[test]
    fn dense_state_matches_function() {
        let l = Lattice::new(LatticeKind::Triangular, 2, 2, Boundary::Open).unwrap();
        let s = build_lattice_state(&l, Phase::CczOnly).unwrap();
        let psi = s.state().unwrap();
        let f = s.function().unwrap();
        for x in 0..16 {
            let sign = if f.eval(x) { -1.0 } else { 1.0 };
            assert!((psi.amps[x].re - sign * 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn serde_names_are_kebab_case() {
        assert_eq!(
            serde_json::to_string(&LatticeKind::UnionJack).unwrap(),
            "\"union-jack\""
        );
        assert_eq!(
            serde_json::to_string(&Phase::LevinGu).unwrap(),
            "\"levin-gu\""
        );
        assert_eq!(serde_json::to_string(&Boundary::Open).unwrap(), "\"open\"");
    }
}
