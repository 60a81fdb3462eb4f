//! Dense state vectors and density matrices.
//!
//! Basis index `i` encodes the site values in base `d` with site 0 (x₁) as
//! the least significant digit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `d^n`, checked against overflow.
pub fn hilbert_dim(n: usize, d: usize) -> Result<usize> {
    (d as u64)
        .checked_pow(n as u32)
        .filter(|&v| v <= (1u64 << 30))
        .map(|v| v as usize)
        .ok_or_else(|| Error::ResourceLimit(format!("d^n too large for n={n}, d={d}")))
}

/// Digit of site `site` in basis index `index`.
#[inline]
pub fn digit(index: usize, site: usize, d: usize) -> usize {
    (index / d.pow(site as u32)) % d
}

/// An explicit pure state over `n` sites of local dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseState {
    pub n: usize,
    pub d: usize,
    pub amps: Vec<C64>,
}

impl DenseState {
    pub fn new(n: usize, d: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = hilbert_dim(n, d)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim} amplitudes for n={n}, d={d}, got {}",
                amps.len()
            )));
        }
        Ok(DenseState { n, d, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, d: usize, index: usize) -> Result<Self> {
        let dim = hilbert_dim(n, d)?;
        if index >= dim {
            return Err(Error::InvalidInput(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(DenseState { n, d, amps })
    }

    /// `|+⟩^{⊗n}` for qubits, and the uniform superposition in general.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        let dim = hilbert_dim(n, d)?;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(DenseState {
            n,
            d,
            amps: vec![a; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let nrm = self.norm();
        if nrm < 1e-300 {
            return Err(Error::InvalidInput(
                "cannot normalize the zero vector".into(),
            ));
        }
        for a in &mut self.amps {
            *a /= nrm;
        }
        Ok(self)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> Result<C64> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "inner product of (n={}, d={}) with (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `self ⊗ other`, with `self` on the low-order sites.
    pub fn tensor(&self, other: &DenseState) -> Result<DenseState> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(
                "tensor of different local dims".into(),
            ));
        }
        let low = self.dim();
        let mut amps = vec![ZERO; low * other.dim()];
        for (j, b) in other.amps.iter().enumerate() {
            for (i, a) in self.amps.iter().enumerate() {
                amps[j * low + i] = a * b;
            }
        }
        DenseState::new(self.n + other.n, self.d, amps)
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix {
            n: self.n,
            d: self.d,
            matrix: m,
        }
    }

    /// Multiplies by a global phase so that the first entry with modulus above
    /// `1e-9` is real and positive.
    pub fn canonical_phase(mut self) -> Self {
        if let Some(a) = self.amps.iter().find(|a| a.norm() > 1e-9).copied() {
            let ph = a.conj() / a.norm();
            for x in &mut self.amps {
                *x *= ph;
            }
        }
        self
    }
}

#[inline]
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A density matrix over `n` sites of local dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub n: usize,
    pub d: usize,
    pub matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(n: usize, d: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = hilbert_dim(n, d)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim} density matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DensityMatrix { n, d, matrix })
    }

    pub fn maximally_mixed(n: usize, d: usize) -> Result<Self> {
        let dim = hilbert_dim(n, d)?;
        let m = DMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix { n, d, matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let a = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let err = self.hermiticity_error();
        if err > tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (deviation {err:.3e})"
            )));
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(psi);
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }

    /// Projector onto eigenvectors with eigenvalue above `cutoff`.
    pub fn support_projector(&self, cutoff: f64) -> DMatrix<C64> {
        let eig = self.matrix.clone().symmetric_eigen();
        let dim = self.dim();
        let mut p = DMatrix::<C64>::zeros(dim, dim);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > cutoff {
                let v = eig.eigenvectors.column(k);
                p += v * v.adjoint();
            }
        }
        p
    }
}
