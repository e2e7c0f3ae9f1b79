//! Arithmetic over GF(2^m) for 1 <= m <= 5 using exponent/log tables.
//!
//! Elements are integers in `[0, q)` whose bits are polynomial-basis
//! coefficients, least-significant bit = constant term. Addition is XOR.

use crate::Error;

/// Largest supported extension degree.
pub const MAX_M: u32 = 5;

/// Primitive polynomial (bitmask including the x^m term) used for each m.
pub const fn primitive_poly(m: u32) -> Option<u32> {
    match m {
        1 => Some(0b11),       // x + 1
        2 => Some(0b111),      // x^2 + x + 1
        3 => Some(0b1011),     // x^3 + x + 1
        4 => Some(0b10011),    // x^4 + x + 1
        5 => Some(0b100101),   // x^5 + x^2 + 1
        _ => None,
    }
}

/// Field arithmetic for the binary extension field GF(2^m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTable {
    m: u32,
    q: usize,
    prim_poly: u32,
    exp: Vec<u8>,
    log: Vec<u8>,
}

impl FieldTable {
    /// Builds the tables for GF(2^m).
    pub fn new(m: u32) -> Result<Self, Error> {
        let prim_poly = primitive_poly(m).ok_or(Error::UnsupportedField(m))?;
        let q = 1usize << m;
        let order = q - 1;
        let mut exp = Vec::with_capacity(order);
        // log[0] is never read.
        let mut log = vec![0u8; q];
        let mut x: u32 = 1;
        for i in 0..order {
            exp.push(x as u8);
            log[x as usize] = i as u8;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= prim_poly;
            }
        }
        Ok(FieldTable {
            m,
            q,
            prim_poly,
            exp,
            log,
        })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn prim_poly(&self) -> u32 {
        self.prim_poly
    }

    /// Powers of the primitive element, `exp_table()[i] = alpha^i`.
    pub fn exp_table(&self) -> &[u8] {
        &self.exp
    }

    /// Discrete logarithm of a nonzero element.
    pub fn log_of(&self, a: u8) -> Result<u8, Error> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::Domain("log of zero"));
        }
        Ok(self.log[a as usize])
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.q - 1;
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.exp[s % order]
    }

    pub fn inv(&self, a: u8) -> Result<u8, Error> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::Domain("inverse of zero"));
        }
        let order = self.q - 1;
        let l = self.log[a as usize] as usize;
        Ok(self.exp[(order - l) % order])
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8, Error> {
        self.check(a)?;
        let binv = self.inv(b)?;
        Ok(self.mul(a, binv))
    }

    /// Checked binary operation dispatch.
    pub fn apply(&self, op: FieldOp, a: u8, b: u8) -> Result<u8, Error> {
        self.check(a)?;
        self.check(b)?;
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Div => self.div(a, b),
            FieldOp::Inv => self.inv(a),
        }
    }

    /// Bit `i` of the polynomial-basis image of `a` (bit 0 = constant term).
    #[inline]
    pub fn bit(&self, a: u8, i: u32) -> u8 {
        (a >> i) & 1
    }

    fn check(&self, a: u8) -> Result<(), Error> {
        if (a as usize) < self.q {
            Ok(())
        } else {
            Err(Error::Domain("element outside field"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Div,
    Inv,
}
