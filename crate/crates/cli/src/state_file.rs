//! JSON state files: `{"n": .., "d": .., "amplitudes": [[re, im], ...]}` in
//! basis order with site 1 as the least significant digit.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use magiclab::state::{hilbert_dim, DenseState, C64};
use serde::{Deserialize, Serialize};

/// Largest allowed deviation of a pure state's norm from 1.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub d: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(psi: &DenseState) -> Self {
        StateFile {
            n: psi.n,
            d: psi.d,
            amplitudes: psi.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn to_state(&self) -> Result<DenseState> {
        let dim = hilbert_dim(self.n, self.d)?;
        if self.amplitudes.len() != dim {
            bail!(
                "state file has {} amplitudes, expected {}^{} = {dim}",
                self.amplitudes.len(),
                self.d,
                self.n
            );
        }
        let amps = self
            .amplitudes
            .iter()
            .map(|a| C64::new(a[0], a[1]))
            .collect();
        let psi = DenseState::new(self.n, self.d, amps)?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            bail!("state has norm {norm}, expected 1 within {NORM_TOL}");
        }
        Ok(psi)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Canonical text: pretty JSON with a trailing newline. Floats print in
    /// shortest round-trip form, so load then dump reproduces the bytes.
    pub fn dump(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading state file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing state file {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.dump()?).with_context(|| format!("writing {}", path.display()))
    }
}
