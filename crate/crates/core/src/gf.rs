//! GF(2^8) arithmetic with primitive polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11d),
//! plus the row-echelon knowledge matrix used by receivers to track their
//! decoding state.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const PRIM_POLY: u16 = 0x11d;

/// exp/log tables for the multiplicative group generated by x (= 0x02).
const fn build_tables() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= PRIM_POLY;
        }
        i += 1;
    }
    // Duplicate so mul can index log[a] + log[b] without a modulo.
    while i < 510 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 512], [u8; 256]) = build_tables();
const EXP: [u8; 512] = TABLES.0;
const LOG: [u8; 256] = TABLES.1;

/// An element of GF(2^8). Addition is XOR; multiplication is modulo 0x11d.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse. Panics on zero, which has none.
    #[inline]
    pub fn inv(self) -> Gf256 {
        assert!(self.0 != 0, "zero has no multiplicative inverse");
        Gf256(EXP[255 - LOG[self.0 as usize] as usize])
    }
}

impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[inline]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf256 {
    type Output = Gf256;
    #[inline]
    fn sub(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256(0);
        }
        Gf256(EXP[LOG[self.0 as usize] as usize + LOG[rhs.0 as usize] as usize])
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Gf256;
    #[inline]
    fn div(self, rhs: Gf256) -> Gf256 {
        self * rhs.inv()
    }
}

impl fmt::Display for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02x}", self.0)
    }
}

/// The header of one transmitted packet: length-K coefficient vector over GF(2^8).
/// Entry k is the coefficient of data packet k in the linear combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingVector {
    coeffs: Vec<Gf256>,
}

impl CodingVector {
    pub fn zero(k: usize) -> Self {
        CodingVector {
            coeffs: vec![Gf256::ZERO; k],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Gf256>) -> Self {
        CodingVector { coeffs }
    }

    /// Unit vector e_k (single uncoded packet k).
    pub fn unit(k_total: usize, k: usize) -> Self {
        let mut v = Self::zero(k_total);
        v.coeffs[k] = Gf256::ONE;
        v
    }

    /// Binary XOR packet over a coding set: coefficient 1 on each listed index.
    pub fn xor_of(k_total: usize, set: &[usize]) -> Self {
        let mut v = Self::zero(k_total);
        for &k in set {
            v.coeffs[k] = Gf256::ONE;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    #[inline]
    pub fn get(&self, k: usize) -> Gf256 {
        self.coeffs[k]
    }

    pub fn set(&mut self, k: usize, c: Gf256) {
        self.coeffs[k] = c;
    }

    /// Indices with nonzero coefficients (the coding set of the packet).
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, _)| k)
            .collect()
    }

    /// self += scale * other
    fn add_scaled(&mut self, other: &CodingVector, scale: Gf256) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += *b * scale;
        }
    }

    fn scale(&mut self, c: Gf256) {
        for a in &mut self.coeffs {
            *a *= c;
        }
    }

    fn leading(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

/// A receiver's knowledge space held in reduced row-echelon form. Each row's
/// leading column holds coefficient 1 and is zero in every other row, so the
/// decoded packets are exactly the singleton rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeMatrix {
    k: usize,
    rows: Vec<CodingVector>, // sorted by leading column
    leads: Vec<usize>,
}

impl KnowledgeMatrix {
    pub fn new(k: usize) -> Self {
        KnowledgeMatrix {
            k,
            rows: Vec::new(),
            leads: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[CodingVector] {
        &self.rows
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.k
    }

    /// Reduces v against the current rows; returns the residual (zero iff v is
    /// in the row span).
    fn reduce(&self, v: &CodingVector) -> CodingVector {
        let mut r = v.clone();
        for (row, &lead) in self.rows.iter().zip(&self.leads) {
            let c = r.get(lead);
            if !c.is_zero() {
                r.add_scaled(row, c); // subtraction == addition in GF(2^m)
            }
        }
        r
    }

    /// True iff v lies outside the current row span.
    pub fn is_innovative(&self, v: &CodingVector) -> bool {
        if v.len() != self.k {
            return false;
        }
        !self.reduce(v).is_zero()
    }

    /// Inserts v if it is innovative, restoring reduced row-echelon form.
    /// Returns true iff the rank increased.
    pub fn eliminate(&mut self, v: &CodingVector) -> Result<bool, Error> {
        if v.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: v.len(),
            });
        }
        let mut r = self.reduce(v);
        let lead = match r.leading() {
            None => return Ok(false),
            Some(l) => l,
        };
        let pivot = r.get(lead);
        if pivot != Gf256::ONE {
            r.scale(pivot.inv());
        }
        // Clear the new leading column from every existing row.
        for row in &mut self.rows {
            let c = row.get(lead);
            if !c.is_zero() {
                row.add_scaled(&r, c);
            }
        }
        let pos = self.leads.partition_point(|&l| l < lead);
        self.rows.insert(pos, r);
        self.leads.insert(pos, lead);
        Ok(true)
    }

    /// Packet indices k whose unit vector e_k lies in the span; in reduced
    /// row-echelon form these are exactly the rows with a single nonzero entry.
    pub fn decoded_indices(&self) -> Vec<usize> {
        self.rows
            .iter()
            .zip(&self.leads)
            .filter(|(row, _)| row.coeffs.iter().filter(|c| !c.is_zero()).count() == 1)
            .map(|(_, &lead)| lead)
            .collect()
    }
}
