//! Arithmetic in GF(2^m) and polynomials over it.
//!
//! Elements are integers below `2^m` in the polynomial basis: bit `i` is the
//! coefficient of `X^i`. Addition is XOR; multiplication goes through
//! log/antilog tables built once per field.

use std::fmt;

use crate::error::{Error, Result};

/// A field element. Every supported field has at most 2^16 elements.
pub type Elem = u16;

/// Primitive polynomials, indexed by `m`. Bit `i` is the coefficient of `X^i`.
const PRIMITIVE_POLYS: [u32; 17] = [
    0,
    0,
    0b111,                 // x^2 + x + 1
    0b1011,                // x^3 + x + 1
    0b1_0011,              // x^4 + x + 1
    0b10_0101,             // x^5 + x^2 + 1
    0b100_0011,            // x^6 + x + 1
    0b1000_1001,           // x^7 + x^3 + 1
    0b1_0001_1101,         // x^8 + x^4 + x^3 + x^2 + 1
    0b10_0001_0001,        // x^9 + x^4 + 1
    0b100_0000_1001,       // x^10 + x^3 + 1
    0b1000_0000_0101,      // x^11 + x^2 + 1
    0b1_0000_0101_0011,    // x^12 + x^6 + x^4 + x + 1
    0b10_0000_0001_1011,   // x^13 + x^4 + x^3 + x + 1
    0b100_0100_0100_0011,  // x^14 + x^10 + x^6 + x + 1
    0b1000_0000_0000_0011, // x^15 + x + 1
    0x1_100B,              // x^16 + x^12 + x^3 + x + 1
];

pub const MIN_EXPONENT: u32 = 2;
pub const MAX_EXPONENT: u32 = 16;

/// The primitive polynomial used for `GF(2^m)`, or `None` when `m` is
/// outside the supported range.
pub fn primitive_poly(m: u32) -> Option<u32> {
    (MIN_EXPONENT..=MAX_EXPONENT)
        .contains(&m)
        .then(|| PRIMITIVE_POLYS[m as usize])
}

/// A finite field of order `2^m` with precomputed log/antilog tables.
#[derive(Clone)]
pub struct Field {
    m: u32,
    prim_poly: u32,
    /// `antilog[k] = alpha^k` for `k` in `0..2(S-1)`, doubled so products of
    /// two logs index directly.
    antilog: Vec<Elem>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("m", &self.m)
            .field("prim_poly", &format_args!("{:#b}", self.prim_poly))
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.prim_poly == other.prim_poly
    }
}

impl Eq for Field {}

impl Field {
    /// Builds `GF(2^m)` from the pinned primitive polynomial.
    ///
    /// Construction walks the powers of `alpha = X` and fails if they do not
    /// cover every nonzero element, so a wrong table entry cannot go
    /// unnoticed.
    pub fn new(m: u32) -> Result<Self> {
        let prim_poly = primitive_poly(m).ok_or_else(|| {
            Error::Config(format!(
                "field exponent m={m} outside supported range {MIN_EXPONENT}..={MAX_EXPONENT}"
            ))
        })?;
        let order = 1usize << m;
        let cycle = order - 1;
        let mut antilog = vec![0 as Elem; 2 * cycle];
        let mut log = vec![u32::MAX; order];
        let mut x: u32 = 1;
        for k in 0..cycle {
            if log[x as usize] != u32::MAX {
                return Err(Error::Config(format!(
                    "polynomial {prim_poly:#b} is not primitive: alpha has order {k}"
                )));
            }
            antilog[k] = x as Elem;
            log[x as usize] = k as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= prim_poly;
            }
        }
        if x != 1 {
            return Err(Error::Config(format!(
                "polynomial {prim_poly:#b} is not primitive"
            )));
        }
        for k in cycle..2 * cycle {
            antilog[k] = antilog[k - cycle];
        }
        Ok(Self {
            m,
            prim_poly,
            antilog,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Field order `S = 2^m`.
    pub fn order(&self) -> usize {
        1 << self.m
    }

    pub fn prim_poly(&self) -> u32 {
        self.prim_poly
    }

    /// The primitive element, the residue class of `X`.
    pub fn alpha(&self) -> Elem {
        2
    }

    fn cycle(&self) -> u32 {
        (self.order() - 1) as u32
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let idx = self.log[a as usize] + self.log[b as usize];
        self.antilog[idx as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::Domain("inverse of zero is undefined".into()));
        }
        let l = self.log[a as usize];
        Ok(self.antilog[((self.cycle() - l) % self.cycle()) as usize])
    }

    /// `alpha^k`, with `k` reduced modulo `S - 1`.
    pub fn exp(&self, k: u64) -> Elem {
        self.antilog[(k % self.cycle() as u64) as usize]
    }

    /// Discrete log base `alpha`; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        match self.log(a) {
            None => 0,
            Some(l) => self.exp(l as u64 * (e % self.cycle() as u64)),
        }
    }

    pub fn contains(&self, a: Elem) -> bool {
        (a as usize) < self.order()
    }
}

/// Polynomial over a binary extension field. `coeffs[n]` multiplies `X^n`;
/// trailing zeros are trimmed so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GfPoly {
    coeffs: Vec<Elem>,
}

impl GfPoly {
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    /// `c * X^n`.
    pub fn monomial(c: Elem, n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of `X^n`, zero past the degree.
    pub fn coeff(&self, n: usize) -> Elem {
        self.coeffs.get(n).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &GfPoly) -> GfPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        GfPoly::new((0..len).map(|n| self.coeff(n) ^ other.coeff(n)).collect())
    }

    /// Multiplies by `X^n`.
    pub fn shift(&self, n: usize) -> GfPoly {
        if self.is_zero() {
            return GfPoly::zero();
        }
        let mut coeffs = vec![0; n];
        coeffs.extend_from_slice(&self.coeffs);
        GfPoly { coeffs }
    }
}

pub fn poly_mul(f: &Field, p: &GfPoly, q: &GfPoly) -> GfPoly {
    if p.is_zero() || q.is_zero() {
        return GfPoly::zero();
    }
    let mut out = vec![0 as Elem; p.coeffs.len() + q.coeffs.len() - 1];
    for (i, &a) in p.coeffs.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in q.coeffs.iter().enumerate() {
            out[i + j] ^= f.mul(a, b);
        }
    }
    GfPoly::new(out)
}

/// Long division; returns `(quotient, remainder)` with `deg(r) < deg(g)`.
pub fn poly_divmod(f: &Field, p: &GfPoly, g: &GfPoly) -> Result<(GfPoly, GfPoly)> {
    let dg = g
        .degree()
        .ok_or_else(|| Error::Domain("division by the zero polynomial".into()))?;
    let lead_inv = f.inv(g.coeffs[dg])?;
    let mut rem = p.coeffs.clone();
    if rem.len() <= dg {
        return Ok((GfPoly::zero(), p.clone()));
    }
    let mut quot = vec![0 as Elem; rem.len() - dg];
    for top in (dg..rem.len()).rev() {
        let c = rem[top];
        if c == 0 {
            continue;
        }
        let factor = f.mul(c, lead_inv);
        quot[top - dg] = factor;
        for (j, &gc) in g.coeffs.iter().enumerate() {
            rem[top - dg + j] ^= f.mul(factor, gc);
        }
    }
    rem.truncate(dg);
    Ok((GfPoly::new(quot), GfPoly::new(rem)))
}

pub fn poly_mod(f: &Field, p: &GfPoly, g: &GfPoly) -> Result<GfPoly> {
    poly_divmod(f, p, g).map(|(_, r)| r)
}

/// Horner evaluation.
pub fn poly_eval(f: &Field, p: &GfPoly, x: Elem) -> Elem {
    p.coeffs.iter().rev().fold(0, |acc, &c| f.mul(acc, x) ^ c)
}
