//! Arithmetic in GF(2^m) through exponential and logarithm tables.
//!
//! Elements are stored as `u8` in polynomial basis; addition is XOR and
//! multiplication goes through `log`/`exp` lookups. The exponential table is
//! doubled in length so that `exp[log a + log b]` never needs a reduction.

use crate::error::{Error, Result};

/// Raw symbol value. All supported fields have at most 256 elements.
pub type Symbol = u8;

/// A field element checked against the size of its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(Symbol);

impl FieldElem {
    pub fn value(self) -> Symbol {
        self.0
    }
}

/// Log/antilog tables for GF(2^m).
#[derive(Debug, Clone)]
pub struct GfTable {
    m: u32,
    q: usize,
    prim_poly: u32,
    exp: Vec<Symbol>,
    log: Vec<u16>,
}

/// Primitive polynomial used for each supported extension degree.
pub fn primitive_poly(m: u32) -> Result<u32> {
    match m {
        2 => Ok(0x7),
        3 => Ok(0xB),
        4 => Ok(0x13),
        5 => Ok(0x25),
        8 => Ok(0x11D),
        _ => Err(Error::UnsupportedDegree(m)),
    }
}

impl GfTable {
    pub fn new(m: u32) -> Result<Self> {
        let prim_poly = primitive_poly(m)?;
        let q = 1usize << m;
        let mut exp = vec![0 as Symbol; 2 * q];
        let mut log = vec![0u16; q];
        let mut x: u32 = 1;
        for i in 0..q - 1 {
            exp[i] = x as Symbol;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= prim_poly;
            }
        }
        debug_assert_eq!(x, 1, "polynomial {prim_poly:#x} is not primitive");
        for i in q - 1..2 * q {
            exp[i] = exp[i - (q - 1)];
        }
        Ok(GfTable {
            m,
            q,
            prim_poly,
            exp,
            log,
        })
    }

    /// Builds the field with `q` elements; `q` must be a supported power of two.
    pub fn with_size(q: usize) -> Result<Self> {
        if !q.is_power_of_two() || q < 2 {
            return Err(Error::InvalidParameters(format!("field size {q} is not a power of two")));
        }
        Self::new(q.trailing_zeros())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn prim_poly(&self) -> u32 {
        self.prim_poly
    }

    /// Order of the multiplicative group, `q - 1`.
    #[inline]
    pub fn order(&self) -> usize {
        self.q - 1
    }

    pub fn exp_table(&self) -> &[Symbol] {
        &self.exp
    }

    pub fn log_table(&self) -> &[u16] {
        &self.log
    }

    pub fn elem(&self, value: u32) -> Result<FieldElem> {
        if (value as usize) < self.q {
            Ok(FieldElem(value as Symbol))
        } else {
            Err(Error::SymbolOutOfRange { value, q: self.q })
        }
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.exp[self.order() - self.log[a as usize] as usize])
    }

    pub fn div(&self, a: Symbol, b: Symbol) -> Result<Symbol> {
        if b == 0 {
            return Err(Error::DivisionByZero);
        }
        if a == 0 {
            return Ok(0);
        }
        let la = self.log[a as usize] as usize;
        let lb = self.log[b as usize] as usize;
        Ok(self.exp[la + self.order() - lb])
    }

    pub fn pow(&self, a: Symbol, e: u64) -> Symbol {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % self.order() as u64);
        self.exp[(l % self.order() as u64) as usize]
    }

    /// `alpha^e` for the primitive element `alpha = 2`; `e` may be any integer.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> Symbol {
        self.exp[e.rem_euclid(self.order() as i64) as usize]
    }

    /// Discrete logarithm of a nonzero element.
    #[inline]
    pub fn log(&self, a: Symbol) -> usize {
        debug_assert!(a != 0);
        self.log[a as usize] as usize
    }

    pub fn add_elem(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.add(a.0, b.0))
    }

    pub fn mul_elem(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(self.mul(a.0, b.0))
    }

    pub fn inv_elem(&self, a: FieldElem) -> Result<FieldElem> {
        self.inv(a.0).map(FieldElem)
    }

    pub fn div_elem(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.div(a.0, b.0).map(FieldElem)
    }
}
