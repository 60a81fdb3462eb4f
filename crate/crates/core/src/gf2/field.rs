use crate::error::{Error, Result};

/// Primitive polynomials over GF(2) for extension degrees 1..=15, bit `k`
/// holding the coefficient of `x^k`. Index `m - 1` holds the degree-`m` entry.
pub const MODULI: [u32; 15] = [
    0b11,   // x + 1
    0x7,    // x^2 + x + 1
    0xB,    // x^3 + x + 1
    0x13,   // x^4 + x + 1
    0x25,   // x^5 + x^2 + 1
    0x43,   // x^6 + x + 1
    0x83,   // x^7 + x + 1
    0x11D,  // x^8 + x^4 + x^3 + x^2 + 1
    0x211,  // x^9 + x^4 + 1
    0x409,  // x^10 + x^3 + 1
    0x805,  // x^11 + x^2 + 1
    0x1053, // x^12 + x^6 + x^4 + x + 1
    0x201B, // x^13 + x^4 + x^3 + x + 1
    0x4443, // x^14 + x^10 + x^6 + x + 1
    0x8003, // x^15 + x + 1
];

pub const MAX_DEGREE: u32 = 15;

/// The field GF(2^m) under the fixed modulus from [`MODULI`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf2m {
    m: u32,
    modulus: u32,
}

impl Gf2m {
    pub fn new(m: u32) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&m) {
            return Err(Error::Unsupported(format!(
                "extension degree {m} outside 1..={MAX_DEGREE}"
            )));
        }
        Ok(Gf2m {
            m,
            modulus: MODULI[(m - 1) as usize],
        })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> u32 {
        1 << self.m
    }

    pub fn element(&self, value: u32) -> FieldElement {
        FieldElement {
            m: self.m,
            value: value & (self.order() - 1),
            modulus: self.modulus,
        }
    }

    #[inline]
    pub fn mul_raw(&self, mut a: u32, mut b: u32) -> u32 {
        let mut acc = 0u32;
        let top = 1u32 << self.m;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    #[inline]
    pub fn pow_raw(&self, x: u32, mut e: u64) -> u32 {
        let mut base = x;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace `x + x^2 + x^4 + ... + x^(2^(m-1))`, which lands in GF(2).
    #[inline]
    pub fn trace_raw(&self, x: u32) -> u8 {
        let mut acc = 0u32;
        let mut y = x;
        for _ in 0..self.m {
            acc ^= y;
            y = self.mul_raw(y, y);
        }
        debug_assert!(acc <= 1, "trace left GF(2): {acc:#x}");
        acc as u8
    }
}

/// An element of GF(2^m) tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub m: u32,
    pub value: u32,
    pub modulus: u32,
}

impl FieldElement {
    fn field(&self) -> Gf2m {
        Gf2m {
            m: self.m,
            modulus: self.modulus,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.modulus != other.modulus {
            return Err(Error::DimensionMismatch(format!(
                "field elements over different moduli ({:#x} vs {:#x})",
                self.modulus, other.modulus
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldElement {
            value: self.value ^ other.value,
            ..*self
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldElement {
            value: self.field().mul_raw(self.value, other.value),
            ..*self
        })
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

/// `x^e` by square-and-multiply; `x^0 = 1`.
pub fn field_pow(x: &FieldElement, e: u64) -> FieldElement {
    FieldElement {
        value: x.field().pow_raw(x.value, e),
        ..*x
    }
}

/// Absolute trace of `x` to GF(2).
pub fn field_trace(x: &FieldElement) -> u8 {
    x.field().trace_raw(x.value)
}
