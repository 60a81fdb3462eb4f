use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 24;

/// A Boolean function of `n` variables held both as its algebraic normal
/// form and as a packed truth table.
///
/// A monomial is a bitmask over variables (bit `k` is `x_{k+1}`; the empty
/// mask is the constant 1). Truth-table bit `i` is `f` evaluated at the
/// binary expansion of `i` with `x₁` as the least significant bit.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BooleanFunction {
    n: usize,
    monomials: BTreeSet<u32>,
    table: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

/// In-place binary Möbius transform; an involution mapping truth tables to
/// ANF coefficient vectors and back.
fn moebius(bits: &mut [u8], n: usize) {
    for k in 0..n {
        let step = 1usize << k;
        for i in 0..bits.len() {
            if i & step != 0 {
                bits[i] ^= bits[i ^ step];
            }
        }
    }
}

impl BooleanFunction {
    pub fn zero(n: usize) -> Result<Self> {
        Self::from_monomials(n, std::iter::empty())
    }

    /// Builds `f = Σ monomials` (repeated monomials cancel).
    pub fn from_monomials(n: usize, monomials: impl IntoIterator<Item = u32>) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::ResourceLimit(format!(
                "{n} variables (max {MAX_VARS})"
            )));
        }
        let mut set = BTreeSet::new();
        for m in monomials {
            if n < 32 && m >> n != 0 {
                return Err(Error::InvalidInput(format!(
                    "monomial {m:#b} uses a variable beyond x{n}"
                )));
            }
            if !set.insert(m) {
                set.remove(&m);
            }
        }
        let mut coeffs = vec![0u8; 1 << n];
        for &m in &set {
            coeffs[m as usize] = 1;
        }
        moebius(&mut coeffs, n);
        let mut table = vec![0u64; words_for(n)];
        for (i, &b) in coeffs.iter().enumerate() {
            if b == 1 {
                table[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(BooleanFunction {
            n,
            monomials: set,
            table,
        })
    }

    /// Builds from monomials given as lists of 0-based variable indices.
    pub fn from_index_sets<'a>(
        n: usize,
        sets: impl IntoIterator<Item = &'a [usize]>,
    ) -> Result<Self> {
        let mut masks = Vec::new();
        for s in sets {
            let mut m = 0u32;
            for &v in s {
                if v >= n {
                    return Err(Error::InvalidInput(format!("variable index {v} >= {n}")));
                }
                m |= 1 << v;
            }
            masks.push(m);
        }
        Self::from_monomials(n, masks)
    }

    /// Builds from a truth table given as a function of the input index.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::ResourceLimit(format!(
                "{n} variables (max {MAX_VARS})"
            )));
        }
        let mut bits: Vec<u8> = (0..1usize << n).map(|i| f(i) as u8).collect();
        let mut table = vec![0u64; words_for(n)];
        for (i, &b) in bits.iter().enumerate() {
            if b == 1 {
                table[i / 64] |= 1 << (i % 64);
            }
        }
        moebius(&mut bits, n);
        let monomials = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i as u32)
            .collect();
        Ok(BooleanFunction {
            n,
            monomials,
            table,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &BTreeSet<u32> {
        &self.monomials
    }

    pub fn table_words(&self) -> &[u64] {
        &self.table
    }

    pub fn degree(&self) -> usize {
        self.monomials
            .iter()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        (self.table[x / 64] >> (x % 64)) & 1 == 1
    }

    /// Hamming weight of the truth table.
    pub fn weight(&self) -> u64 {
        self.table.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "functions of {} and {} variables",
                self.n, other.n
            )));
        }
        let monomials = self
            .monomials
            .symmetric_difference(&other.monomials)
            .copied()
            .collect();
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BooleanFunction {
            n: self.n,
            monomials,
            table,
        })
    }

    /// Part of the ANF with monomials of exactly `degree` variables.
    pub fn homogeneous_part(&self, degree: usize) -> Self {
        Self::from_monomials(
            self.n,
            self.monomials
                .iter()
                .copied()
                .filter(|m| m.count_ones() as usize == degree),
        )
        .expect("same n")
    }

    /// Part of the ANF with monomials of at most `degree` variables.
    pub fn low_degree_part(&self, degree: usize) -> Self {
        Self::from_monomials(
            self.n,
            self.monomials
                .iter()
                .copied()
                .filter(|m| m.count_ones() as usize <= degree),
        )
        .expect("same n")
    }

    /// Substitutes `x ↦ A x + b` (A given column-wise as bitmasks).
    pub fn affine_substitute(&self, columns: &[u32], shift: u32) -> Result<Self> {
        if columns.len() != self.n {
            return Err(Error::DimensionMismatch("substitution size".into()));
        }
        Self::from_fn(self.n, |x| {
            let mut y = shift as usize;
            for (k, &col) in columns.iter().enumerate() {
                if (x >> k) & 1 == 1 {
                    y ^= col as usize;
                }
            }
            self.eval(y)
        })
    }

    /// Truth-table hex dump, LSB-first: hex digit `j` holds bits `4j..4j+3`,
    /// least significant bit first.
    pub fn to_hex(&self) -> String {
        let nbits = 1usize << self.n;
        let digits = nbits.div_ceil(4);
        (0..digits)
            .map(|j| {
                let mut v = 0u32;
                for b in 0..4 {
                    let i = 4 * j + b;
                    if i < nbits && self.eval(i) {
                        v |= 1 << b;
                    }
                }
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let nbits = 1usize << n;
        let digits: Vec<u32> = hex
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(16)
                    .ok_or_else(|| Error::Parse(format!("bad hex digit '{c}'")))
            })
            .collect::<Result<_>>()?;
        if digits.len() != nbits.div_ceil(4) {
            return Err(Error::Parse(format!(
                "expected {} hex digits for n={n}, got {}",
                nbits.div_ceil(4),
                digits.len()
            )));
        }
        Self::from_fn(n, |i| (digits[i / 4] >> (i % 4)) & 1 == 1)
    }

    /// Parses ANF text such as `x1*x2*x3 + x1 + 1`. `n` defaults to the
    /// largest variable index mentioned.
    pub fn parse_anf(text: &str, n: Option<usize>) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut masks = Vec::new();
        let mut max_var = 0usize;
        if !(s.is_empty() || s == "0") {
            for term in s.split('+') {
                if term.is_empty() {
                    return Err(Error::Parse(format!("empty term in {text:?}")));
                }
                if term == "1" {
                    masks.push(0u32);
                    continue;
                }
                let mut m = 0u32;
                for factor in term.split('*') {
                    let idx: usize = factor
                        .strip_prefix('x')
                        .and_then(|d| d.parse().ok())
                        .filter(|&k| (1..=MAX_VARS).contains(&k))
                        .ok_or_else(|| {
                            Error::Parse(format!("bad factor {factor:?} in {text:?}"))
                        })?;
                    max_var = max_var.max(idx);
                    m |= 1 << (idx - 1);
                }
                masks.push(m);
            }
        }
        let n = match n {
            Some(n) if n < max_var => {
                return Err(Error::Parse(format!("x{max_var} used but n = {n}")));
            }
            Some(n) => n,
            None => max_var,
        };
        Self::from_monomials(n, masks)
    }

    /// ANF text in the same grammar [`BooleanFunction::parse_anf`] accepts.
    pub fn anf_string(&self) -> String {
        if self.monomials.is_empty() {
            return "0".into();
        }
        let mut terms: Vec<&u32> = self.monomials.iter().collect();
        terms.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), m.reverse_bits()));
        terms
            .into_iter()
            .map(|&m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    (0..32)
                        .filter(|k| (m >> k) & 1 == 1)
                        .map(|k| format!("x{}", k + 1))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.n, self.anf_string())
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.anf_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cubic_monomial_truth_table() {
        let f = BooleanFunction::parse_anf("x1*x2*x3", None).unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(f.weight(), 1);
        assert!(f.eval(0b111));
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn truth_table_index_is_lsb_first() {
        let f = BooleanFunction::parse_anf("x1", Some(3)).unwrap();
        for i in 0..8 {
            assert_eq!(f.eval(i), i & 1 == 1);
        }
    }

    #[test]
    fn anf_text_round_trip() {
        let f = BooleanFunction::parse_anf("x1*x2 + x3 + 1 + x2*x4*x1", None).unwrap();
        let g = BooleanFunction::parse_anf(&f.anf_string(), Some(4)).unwrap();
        assert_eq!(f, g);
        assert_eq!(
            BooleanFunction::parse_anf("0", Some(2)).unwrap().weight(),
            0
        );
        assert!(BooleanFunction::parse_anf("x1*y2", None).is_err());
        assert!(BooleanFunction::parse_anf("x1++x2", None).is_err());
        assert!(BooleanFunction::parse_anf("x5", Some(3)).is_err());
    }

    #[test]
    fn repeated_monomials_cancel() {
        let f = BooleanFunction::parse_anf("x1*x2 + x1*x2 + x3", None).unwrap();
        assert_eq!(f.anf_string(), "x3");
    }

    #[test]
    fn hex_dump() {
        let f = BooleanFunction::parse_anf("x1*x2*x3", None).unwrap();
        assert_eq!(f.to_hex(), "08");
        let g = BooleanFunction::from_hex(3, "08").unwrap();
        assert_eq!(f, g);
        assert!(BooleanFunction::from_hex(3, "0").is_err());
    }

    proptest! {
        #[test]
        fn anf_and_table_agree(n in 1usize..8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let bits: Vec<bool> = (0..1usize << n).map(|_| rng.random()).collect();
            let f = BooleanFunction::from_fn(n, |i| bits[i]).unwrap();
            let g = BooleanFunction::from_monomials(n, f.monomials().iter().copied()).unwrap();
            prop_assert_eq!(&f, &g);
            for (i, &b) in bits.iter().enumerate() {
                prop_assert_eq!(g.eval(i), b);
            }
        }
    }
}
