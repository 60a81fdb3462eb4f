//! Versioned binary cache of stabilizer dictionaries.
//!
//! Layout (little endian): `"MSTB"`, version `u32`, `n` `u32`, `d` `u32`,
//! count `u64`, then per entry `n` generators of `n` x-digits, `n` z-digits
//! and one phase byte each, followed by `d^n` amplitudes as `(f32, f32)`.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::enumerate::{
    count_stabilizer_states, enumerate_stabilizer_states, GenerationMeta, StabEntry,
    StabilizerDictionary, CONVENTION_VERSION,
};
use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, StabilizerTableau};
use crate::state::{hilbert_dim, DenseState, C64, ZERO};

pub const MAGIC: &[u8; 4] = b"MSTB";
pub const CACHE_ENV: &str = "MAGICLAB_CACHE_DIR";
pub const DEFAULT_CACHE_ROOT: &str = "magic-stab-cache";

/// Cache root: `$MAGICLAB_CACHE_DIR` if set, else `./magic-stab-cache`.
pub fn cache_root() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_ROOT))
}

pub fn cache_path(root: &Path, n: usize, d: usize) -> PathBuf {
    root.join(format!("v{CONVENTION_VERSION}"))
        .join(format!("n{n}d{d}.bin"))
}

pub fn write_dictionary(dict: &StabilizerDictionary, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("bin.tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(MAGIC)?;
        w.write_all(&CONVENTION_VERSION.to_le_bytes())?;
        w.write_all(&(dict.n as u32).to_le_bytes())?;
        w.write_all(&(dict.d as u32).to_le_bytes())?;
        w.write_all(&(dict.entries.len() as u64).to_le_bytes())?;
        for e in &dict.entries {
            for g in &e.tableau.generators {
                w.write_all(&g.x)?;
                w.write_all(&g.z)?;
                w.write_all(&[g.phase])?;
            }
            for a in &e.state.amps {
                w.write_all(&(a.re as f32).to_le_bytes())?;
                w.write_all(&(a.im as f32).to_le_bytes())?;
            }
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Restores exact amplitudes from single-precision storage: stabilizer
/// amplitudes share one modulus `1/√|support|` and have phases that are
/// multiples of `π/d` once the global phase is canonical.
fn snap_amplitudes(raw: &[C64], d: usize) -> Result<Vec<C64>> {
    let support = raw.iter().filter(|a| a.norm() > 1e-3).count();
    if support == 0 {
        return Err(Error::Cache("entry with zero amplitudes".into()));
    }
    let modulus = 1.0 / (support as f64).sqrt();
    let step = std::f64::consts::PI / d as f64;
    let snapped: Vec<C64> = raw
        .iter()
        .map(|a| {
            if a.norm() > 1e-3 {
                let k = (a.arg() / step).round();
                C64::from_polar(modulus, k * step)
            } else {
                ZERO
            }
        })
        .collect();
    let worst = raw
        .iter()
        .zip(&snapped)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if worst > 1e-5 {
        return Err(Error::Cache(format!("amplitude snap error {worst:.2e}")));
    }
    Ok(snapped)
}

/// Reads a cache file, checking header fields against `(n, d)`.
pub fn read_dictionary(path: &Path, n: usize, d: usize) -> Result<StabilizerDictionary> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != CONVENTION_VERSION {
        return Err(Error::Cache(format!(
            "cache version {version}, expected {CONVENTION_VERSION}"
        )));
    }
    let (fn_, fd) = (read_u32(&mut r)? as usize, read_u32(&mut r)? as usize);
    if (fn_, fd) != (n, d) {
        return Err(Error::Cache(format!("cache holds n={fn_}, d={fd}")));
    }
    let mut cb = [0u8; 8];
    r.read_exact(&mut cb)?;
    let count = u64::from_le_bytes(cb);
    if count as u128 != count_stabilizer_states(n, d) {
        return Err(Error::Cache(format!(
            "cache count {count} does not match formula"
        )));
    }
    let dim = hilbert_dim(n, d)?;
    let mut entries = Vec::with_capacity(count as usize);
    let mut gen_buf = vec![0u8; 2 * n + 1];
    let mut amp_buf = vec![0u8; 8 * dim];
    for _ in 0..count {
        let mut generators = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut gen_buf)?;
            generators.push(
                PauliOperator::new(
                    d,
                    gen_buf[..n].to_vec(),
                    gen_buf[n..2 * n].to_vec(),
                    gen_buf[2 * n],
                )
                .map_err(|e| Error::Cache(e.to_string()))?,
            );
        }
        r.read_exact(&mut amp_buf)?;
        let raw: Vec<C64> = amp_buf
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64;
                let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]) as f64;
                C64::new(re, im)
            })
            .collect();
        let amps = snap_amplitudes(&raw, d)?;
        entries.push(StabEntry {
            tableau: StabilizerTableau { n, d, generators },
            state: DenseState::new(n, d, amps)?,
        });
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Cache("trailing bytes after entries".into()));
    }
    let generated_unix = fs::metadata(path)
        .and_then(|m| m.modified())
        .ok()
        .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
        .map_or(0, |d| d.as_secs());
    Ok(StabilizerDictionary {
        n,
        d,
        entries,
        meta: GenerationMeta {
            generated_unix,
            convention_version: version,
        },
    })
}

/// Loads the cached dictionary under `root`, regenerating and rewriting it
/// when missing, stale or corrupt.
pub fn load_or_generate(root: &Path, n: usize, d: usize) -> Result<StabilizerDictionary> {
    let path = cache_path(root, n, d);
    if path.exists() {
        if let Ok(dict) = read_dictionary(&path, n, d) {
            return Ok(dict);
        }
    }
    let dict = enumerate_stabilizer_states(n, d)?;
    write_dictionary(&dict, &path)?;
    // Hand back the snapped copy so results do not depend on cache state.
    read_dictionary(&path, n, d)
}
