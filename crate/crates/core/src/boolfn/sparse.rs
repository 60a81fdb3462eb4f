use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::function::BooleanFunction;
use crate::error::{Error, Result};

/// ANF without a truth table, for functions on too many variables to
/// tabulate. Monomials are sorted lists of 0-based variable indices; the
/// empty list is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseAnf {
    pub n: usize,
    monomials: BTreeSet<Vec<usize>>,
}

impl SparseAnf {
    pub fn zero(n: usize) -> Self {
        SparseAnf {
            n,
            monomials: BTreeSet::new(),
        }
    }

    /// `Σ monomials`; repeated monomials cancel.
    pub fn new(n: usize, monomials: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut f = Self::zero(n);
        for m in monomials {
            f.toggle(m)?;
        }
        Ok(f)
    }

    /// Adds one monomial mod 2.
    pub fn toggle(&mut self, mut m: Vec<usize>) -> Result<()> {
        m.sort_unstable();
        m.dedup();
        if let Some(&v) = m.iter().find(|&&v| v >= self.n) {
            return Err(Error::InvalidInput(format!(
                "variable index {v} >= {}",
                self.n
            )));
        }
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
        Ok(())
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.monomials.iter()
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "adding functions of {} and {} variables",
                self.n, other.n
            )));
        }
        let monomials = self
            .monomials
            .symmetric_difference(&other.monomials)
            .cloned()
            .collect();
        Ok(SparseAnf {
            n: self.n,
            monomials,
        })
    }

    /// `x_v · self`.
    pub fn times_variable(&self, v: usize) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for m in &self.monomials {
            let mut m = m.clone();
            m.push(v);
            out.toggle(m)?;
        }
        Ok(out)
    }

    pub fn to_function(&self) -> Result<BooleanFunction> {
        BooleanFunction::from_index_sets(self.n, self.monomials.iter().map(Vec::as_slice))
    }

    pub fn from_function(f: &BooleanFunction) -> Self {
        let monomials = f
            .monomials()
            .iter()
            .map(|&m| (0..32).filter(|k| (m >> k) & 1 == 1).collect())
            .collect();
        SparseAnf {
            n: f.n(),
            monomials,
        }
    }
}

impl fmt::Display for SparseAnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<&Vec<usize>> = self.monomials.iter().collect();
        terms.sort_by_key(|m| std::cmp::Reverse(m.len()));
        let text: Vec<String> = terms
            .into_iter()
            .map(|m| {
                if m.is_empty() {
                    "1".to_string()
                } else {
                    m.iter()
                        .map(|v| format!("x{}", v + 1))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect();
        f.write_str(&text.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_truth_table() {
        let f = BooleanFunction::parse_anf("x1*x2*x3 + x2*x4 + x1 + 1", Some(5)).unwrap();
        let s = SparseAnf::from_function(&f);
        assert_eq!(s.len(), 4);
        assert_eq!(s.degree(), 3);
        assert_eq!(s.to_function().unwrap(), f);
    }

    #[test]
    fn repeated_monomials_cancel() {
        let s = SparseAnf::new(40, [vec![1, 39], vec![39, 1], vec![0, 2, 30]]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.to_string(), "x1*x3*x31");
        assert!(s.to_function().is_err());
        assert!(SparseAnf::new(3, [vec![3]]).is_err());
    }

    #[test]
    fn multiplication_by_a_variable() {
        let q = SparseAnf::new(4, [vec![1, 2], vec![3], vec![]]).unwrap();
        let p = q.times_variable(0).unwrap();
        let expected = SparseAnf::new(4, [vec![0, 1, 2], vec![0, 3], vec![0]]).unwrap();
        assert_eq!(p, expected);
        // x_v · x_v = x_v
        let r = SparseAnf::new(2, [vec![0]])
            .unwrap()
            .times_variable(0)
            .unwrap();
        assert_eq!(r, SparseAnf::new(2, [vec![0]]).unwrap());
    }
}
