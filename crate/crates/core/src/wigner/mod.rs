//! Discrete Wigner function of qutrit systems, sum negativity and mana.
//!
//! Phase-space points are indexed by `u = Σ_j (a1_j + 3·a2_j)·9^j`, where
//! site `j` carries the pair `(a1_j, a2_j)` and the displacement is
//! `T_u = ⊗_j ω^{-a1_j a2_j/2} Z^{a1_j} X^{a2_j}` with `1/2 ≡ 2 (mod 3)`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Robustness, RobustnessProgram};
use crate::stabenum::StabilizerDictionary;
use crate::state::{DensityMatrix, C64};

pub const D: usize = 3;
pub const MAX_WIGNER_SITES: usize = 3;
/// `2⁻¹ mod 3`.
const HALF: usize = 2;

fn check_sites(n: usize) -> Result<()> {
    if n == 0 || n > MAX_WIGNER_SITES {
        return Err(Error::Unsupported(format!(
            "Wigner functions for n={n} qutrits (1..={MAX_WIGNER_SITES})"
        )));
    }
    Ok(())
}

fn omega(k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % D) as f64 / D as f64)
}

pub fn num_points(n: usize) -> usize {
    D.pow(2 * n as u32)
}

/// `(a1, a2)` per site for point `index`.
pub fn point_coordinates(n: usize, index: usize) -> Result<Vec<(u8, u8)>> {
    check_sites(n)?;
    if index >= num_points(n) {
        return Err(Error::InvalidInput(format!(
            "phase-space index {index} >= {}",
            num_points(n)
        )));
    }
    Ok((0..n)
        .map(|j| {
            let q = (index / 9usize.pow(j as u32)) % 9;
            ((q % 3) as u8, (q / 3) as u8)
        })
        .collect())
}

pub fn point_index(coords: &[(u8, u8)]) -> usize {
    coords
        .iter()
        .enumerate()
        .map(|(j, &(a1, a2))| (a1 as usize % 3 + 3 * (a2 as usize % 3)) * 9usize.pow(j as u32))
        .sum()
}

fn site_displacement(a1: usize, a2: usize) -> DMatrix<C64> {
    // ω^{-a1 a2 / 2} Z^{a1} X^{a2}: X^{a2}|y⟩ = |y+a2⟩, then Z^{a1} adds ω^{a1(y+a2)}.
    let pre = omega((D * D - (a1 * a2 * HALF) % D) % D);
    let mut m = DMatrix::zeros(D, D);
    for y in 0..D {
        let t = (y + a2) % D;
        m[(t, y)] = pre * omega(a1 * t);
    }
    m
}

fn kron_low(low: &DMatrix<C64>, high: &DMatrix<C64>) -> DMatrix<C64> {
    // Site order LSB-first: `low` acts on the low-order digit.
    high.kronecker(low)
}

/// The displacement operator `T_u`.
pub fn displacement(n: usize, index: usize) -> Result<DMatrix<C64>> {
    let coords = point_coordinates(n, index)?;
    let mut m = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for &(a1, a2) in &coords {
        m = kron_low(&m, &site_displacement(a1 as usize, a2 as usize));
    }
    Ok(m)
}

/// `A_0 = 3^{-n} Σ_u T_u`.
pub fn phase_point_origin(n: usize) -> Result<DMatrix<C64>> {
    check_sites(n)?;
    let dim = D.pow(n as u32);
    let mut a0 = DMatrix::zeros(dim, dim);
    for u in 0..num_points(n) {
        a0 += displacement(n, u)?;
    }
    Ok(a0 / C64::new(dim as f64, 0.0))
}

/// `A_u = T_u A_0 T_u†`.
pub fn phase_point_operator(n: usize, index: usize) -> Result<DMatrix<C64>> {
    let t = displacement(n, index)?;
    Ok(&t * phase_point_origin(n)? * t.adjoint())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerFunction {
    pub n: usize,
    pub values: Vec<f64>,
}

impl WignerFunction {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `Σ_u W(u) A_u`.
    pub fn reconstruct(&self) -> Result<DMatrix<C64>> {
        let dim = D.pow(self.n as u32);
        let a0 = phase_point_origin(self.n)?;
        let mut rho = DMatrix::zeros(dim, dim);
        for (u, &w) in self.values.iter().enumerate() {
            let t = displacement(self.n, u)?;
            rho += (&t * &a0 * t.adjoint()) * C64::new(w, 0.0);
        }
        Ok(rho)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,a1,a2,value\n");
        for (u, &w) in self.values.iter().enumerate() {
            let coords = point_coordinates(self.n, u).expect("index in range");
            let a1: String = coords.iter().map(|c| char::from(b'0' + c.0)).collect();
            let a2: String = coords.iter().map(|c| char::from(b'0' + c.1)).collect();
            writeln!(out, "{u},{a1},{a2},{w:.17e}").expect("write to string");
        }
        out
    }
}

/// `W_ρ(u) = 3^{-n} Tr(A_u ρ)`.
pub fn wigner(rho: &DensityMatrix) -> Result<WignerFunction> {
    if rho.d != D {
        return Err(Error::Unsupported(format!(
            "Wigner function for d={}",
            rho.d
        )));
    }
    check_sites(rho.n)?;
    rho.require_hermitian(1e-9)?;
    let dim = rho.dim() as f64;
    let a0 = phase_point_origin(rho.n)?;
    let values = (0..num_points(rho.n))
        .map(|u| {
            let t = displacement(rho.n, u)?;
            // Tr(T A_0 T† ρ) = Tr(A_0 T† ρ T)
            let inner = t.adjoint() * &rho.matrix * &t;
            Ok((&a0 * inner).trace().re / dim)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WignerFunction { n: rho.n, values })
}

/// Total negative mass `Σ_{W<0} |W(u)|`.
pub fn sum_negativity(w: &WignerFunction) -> f64 {
    w.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum()
}

/// `log₂(2𝒩 + 1)`.
pub fn mana(w: &WignerFunction) -> f64 {
    (2.0 * sum_negativity(w) + 1.0).log2()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManaCheck {
    pub negativity: f64,
    pub mana: f64,
    pub r: f64,
    pub lr: f64,
    /// `𝒩 ≤ R + tol`.
    pub negativity_ok: bool,
    /// `𝓜 < LR + 1 + tol`.
    pub mana_ok: bool,
}

pub const CHECK_TOL: f64 = 1e-8;

pub fn mana_lr_from(w: &WignerFunction, rob: &Robustness) -> ManaCheck {
    let negativity = sum_negativity(w);
    let m = mana(w);
    ManaCheck {
        negativity,
        mana: m,
        r: rob.r,
        lr: rob.lr,
        negativity_ok: negativity <= rob.r + CHECK_TOL,
        mana_ok: m < rob.lr + 1.0 + CHECK_TOL,
    }
}

/// Compares mana and sum negativity with the free robustness over `dict`.
pub fn mana_lr_check(rho: &DensityMatrix, dict: &StabilizerDictionary) -> Result<ManaCheck> {
    let w = wigner(rho)?;
    let rob = RobustnessProgram::new(dict)?.solve(rho)?;
    Ok(mana_lr_from(&w, &rob))
}
