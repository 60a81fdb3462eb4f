use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{hilbert_dim, C64, ZERO};

/// Generalized Pauli operator `e^{iπ·phase/d} · ⊗_j X^{x_j} Z^{z_j}` on `n`
/// sites of local dimension `d ∈ {2, 3}`.
///
/// For qubits the phase unit is `i`, so `Y = i·XZ` has `phase = 1` and
/// `x = z = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    pub n: usize,
    pub d: usize,
    pub x: Vec<u8>,
    pub z: Vec<u8>,
    /// Power of `e^{iπ/d}`, reduced mod `2d`.
    pub phase: u8,
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "local dimension {d} (only 2 and 3)"
        )))
    }
}

impl PauliOperator {
    pub fn new(d: usize, x: Vec<u8>, z: Vec<u8>, phase: u8) -> Result<Self> {
        check_dim(d)?;
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch(
                "x and z vectors differ in length".into(),
            ));
        }
        if x.iter().chain(&z).any(|&v| v as usize >= d) {
            return Err(Error::InvalidInput(format!("exponent outside Z_{d}")));
        }
        Ok(PauliOperator {
            n: x.len(),
            d,
            x,
            z,
            phase: phase % (2 * d as u8),
        })
    }

    pub fn identity(n: usize, d: usize) -> Self {
        PauliOperator {
            n,
            d,
            x: vec![0; n],
            z: vec![0; n],
            phase: 0,
        }
    }

    /// `X^power` on `site`, identity elsewhere.
    pub fn single_x(n: usize, d: usize, site: usize, power: u8) -> Self {
        let mut p = Self::identity(n, d);
        p.x[site] = power % d as u8;
        p
    }

    /// `Z^power` on `site`, identity elsewhere.
    pub fn single_z(n: usize, d: usize, site: usize, power: u8) -> Self {
        let mut p = Self::identity(n, d);
        p.z[site] = power % d as u8;
        p
    }

    /// Qubit operator with the phase chosen so that it is Hermitian.
    pub fn hermitian_qubit(x: &[bool], z: &[bool]) -> Self {
        let w = x.iter().zip(z).filter(|(a, b)| **a && **b).count();
        PauliOperator {
            n: x.len(),
            d: 2,
            x: x.iter().map(|&b| b as u8).collect(),
            z: z.iter().map(|&b| b as u8).collect(),
            phase: (w % 4) as u8,
        }
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "Pauli on (n={}, d={}) vs (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }

    /// Symplectic form `x_P·z_Q − z_P·x_Q mod d`.
    pub fn symplectic(&self, other: &Self) -> Result<u8> {
        self.same_space(other)?;
        let d = self.d as i64;
        let s: i64 = (0..self.n)
            .map(|j| self.x[j] as i64 * other.z[j] as i64 - self.z[j] as i64 * other.x[j] as i64)
            .sum();
        Ok(s.rem_euclid(d) as u8)
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    /// Product `self · other`, phases tracked exactly.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let d = self.d as u32;
        // Z^b X^c = ω^{bc} X^c Z^b, and ω is the square of the phase unit.
        let cross: u32 = (0..self.n)
            .map(|j| self.z[j] as u32 * other.x[j] as u32)
            .sum();
        let phase = (self.phase as u32 + other.phase as u32 + 2 * cross) % (2 * d);
        Ok(PauliOperator {
            n: self.n,
            d: self.d,
            x: (0..self.n)
                .map(|j| ((self.x[j] + other.x[j]) as u32 % d) as u8)
                .collect(),
            z: (0..self.n)
                .map(|j| ((self.z[j] + other.z[j]) as u32 % d) as u8)
                .collect(),
            phase: phase as u8,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.n, self.d);
        for _ in 0..e {
            acc = acc.mul(self).expect("same space");
        }
        acc
    }

    pub fn adjoint(&self) -> Self {
        // (c·X^x Z^z)† has the same support as the d-1 power times a phase;
        // compute via P^{d-1} scaled by the inverse of P^d's phase.
        let pd = self.pow(self.d as u32);
        debug_assert!(pd.is_identity_up_to_phase());
        let mut inv = self.pow(self.d as u32 - 1);
        let m = 2 * self.d as u8;
        inv.phase = (inv.phase + m - pd.phase) % m;
        inv
    }

    /// Whether `P^d = 𝟙` exactly (needed for a +1 eigenspace projector).
    pub fn has_order_d(&self) -> bool {
        let p = self.pow(self.d as u32);
        p.is_identity_up_to_phase() && p.phase == 0
    }

    /// Weight: number of sites acted on nontrivially.
    pub fn weight(&self) -> usize {
        (0..self.n)
            .filter(|&j| self.x[j] != 0 || self.z[j] != 0)
            .count()
    }

    pub fn phase_value(&self) -> C64 {
        C64::from_polar(
            1.0,
            std::f64::consts::PI * self.phase as f64 / self.d as f64,
        )
    }

    /// Computes `self |v⟩` for a dense vector in the LSB-first basis.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        let table = self.action_table();
        for (y, amp) in v.iter().enumerate() {
            let (target, ph) = table[y];
            out[target] = ph * amp;
        }
    }

    /// For each basis index `y`, the image index and phase of `P|y⟩`.
    pub fn action_table(&self) -> Vec<(usize, C64)> {
        let d = self.d;
        let dim = d.pow(self.n as u32);
        let global = self.phase_value();
        let omega: Vec<C64> = (0..d)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64))
            .collect();
        let mut table = Vec::with_capacity(dim);
        for y in 0..dim {
            let mut rem = y;
            let mut target = 0usize;
            let mut place = 1usize;
            let mut zy = 0usize;
            for j in 0..self.n {
                let yj = rem % d;
                rem /= d;
                zy += self.z[j] as usize * yj;
                target += ((yj + self.x[j] as usize) % d) * place;
                place *= d;
            }
            table.push((target, global * omega[zy % d]));
        }
        table
    }

    /// Dense matrix in the LSB-first basis (row-major).
    pub fn to_matrix(&self) -> nalgebra::DMatrix<C64> {
        let dim = hilbert_dim(self.n, self.d).expect("small operator");
        let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for (y, (t, ph)) in self.action_table().into_iter().enumerate() {
            m[(t, y)] = ph;
        }
        m
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let pv = self.apply(psi);
        crate::state::inner(psi, &pv)
    }

    /// Symplectic coordinates as one vector `(x | z)`.
    pub fn symplectic_vector(&self) -> Vec<u8> {
        self.x.iter().chain(&self.z).copied().collect()
    }
}

/// True iff the two operators commute.
pub fn pauli_commutes(p: &PauliOperator, q: &PauliOperator) -> Result<bool> {
    Ok(p.symplectic(q)? == 0)
}

const QUTRIT_PREFIXES: [(u8, &str); 6] = [
    (0, "+"),
    (1, "-w2"),
    (2, "+w"),
    (3, "-"),
    (4, "+w2"),
    (5, "-w"),
];

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 2 {
            let ys = (0..self.n)
                .filter(|&j| self.x[j] == 1 && self.z[j] == 1)
                .count();
            let prefix = match (self.phase as usize + 4 - ys % 4) % 4 {
                0 => "+",
                1 => "+i",
                2 => "-",
                _ => "-i",
            };
            write!(f, "{prefix}")?;
            for j in 0..self.n {
                let c = match (self.x[j], self.z[j]) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (0, 1) => 'Z',
                    _ => 'Y',
                };
                write!(f, "{c}")?;
            }
        } else {
            let prefix = QUTRIT_PREFIXES
                .iter()
                .find(|(p, _)| *p == self.phase)
                .map(|(_, s)| *s)
                .unwrap_or("+");
            write!(f, "{prefix}")?;
            for j in 0..self.n {
                if self.x[j] == 0 && self.z[j] == 0 {
                    write!(f, "I")?;
                } else {
                    write!(f, "X{}Z{}", self.x[j], self.z[j])?;
                }
            }
        }
        Ok(())
    }
}

impl PauliOperator {
    /// Parses the text format: a phase prefix followed by one token per site.
    ///
    /// Qubits: `[+|-][i]` then letters from `IXYZ`, e.g. `+XIZ`, `-iYY`.
    /// Qutrits: `[+|-][w|w2]` then per site `I` or `X<a>Z<b>` (either factor
    /// may be omitted), optionally separated by whitespace or `.`.
    pub fn parse(text: &str, d: usize) -> Result<Self> {
        check_dim(d)?;
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = s.as_str();
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        if d == 2 {
            let mut phase: u32 = if negative { 2 } else { 0 };
            if let Some(r) = rest.strip_prefix('i') {
                phase += 1;
                rest = r;
            }
            let mut x = Vec::new();
            let mut z = Vec::new();
            for c in rest.chars() {
                let (a, b) = match c {
                    'I' => (0, 0),
                    'X' => (1, 0),
                    'Z' => (0, 1),
                    'Y' => {
                        phase += 1;
                        (1, 1)
                    }
                    _ => {
                        return Err(Error::Parse(format!(
                            "unexpected '{c}' in Pauli string {text:?}"
                        )))
                    }
                };
                x.push(a);
                z.push(b);
            }
            if x.is_empty() {
                return Err(Error::Parse(format!("empty Pauli string {text:?}")));
            }
            PauliOperator::new(2, x, z, (phase % 4) as u8)
        } else {
            let mut phase: u32 = if negative { 3 } else { 0 };
            if let Some(r) = rest.strip_prefix("w2") {
                phase += 4;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('w') {
                phase += 2;
                rest = r;
            }
            let chars: Vec<char> = rest.chars().filter(|&c| c != '.').collect();
            let mut x = Vec::new();
            let mut z = Vec::new();
            let mut i = 0;
            let exponent = |i: usize| -> Result<u8> {
                chars
                    .get(i)
                    .and_then(|c| c.to_digit(10))
                    .filter(|&v| v < 3)
                    .map(|v| v as u8)
                    .ok_or_else(|| Error::Parse(format!("expected exponent 0..2 in {text:?}")))
            };
            while i < chars.len() {
                match chars[i] {
                    'I' => {
                        x.push(0);
                        z.push(0);
                        i += 1;
                    }
                    'X' => {
                        let a = exponent(i + 1)?;
                        i += 2;
                        let mut b = 0;
                        if chars.get(i) == Some(&'Z') {
                            b = exponent(i + 1)?;
                            i += 2;
                        }
                        x.push(a);
                        z.push(b);
                    }
                    'Z' => {
                        let b = exponent(i + 1)?;
                        i += 2;
                        x.push(0);
                        z.push(b);
                    }
                    c => {
                        return Err(Error::Parse(format!(
                            "unexpected '{c}' in Pauli string {text:?}"
                        )))
                    }
                }
            }
            if x.is_empty() {
                return Err(Error::Parse(format!("empty Pauli string {text:?}")));
            }
            PauliOperator::new(3, x, z, (phase % 6) as u8)
        }
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses a qubit Pauli string.
    fn from_str(s: &str) -> Result<Self> {
        PauliOperator::parse(s, 2)
    }
}
