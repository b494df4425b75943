//! Finite fields GF(p^e) with q = p^e <= 2^16.
//!
//! Elements are integer codes: the polynomial `c_0 + c_1 u + ... + c_{e-1} u^{e-1}`
//! over F_p is stored as `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`. Zero is code 0 and
//! one is code 1. Multiplication goes through discrete log / exp tables built
//! from the smallest primitive element.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("modulus {0:?} is reducible over F_p")]
    ReducibleModulus(Vec<u32>),
    #[error("modulus has degree {got:?}, expected {expected}")]
    DegreeMismatch { expected: u32, got: Option<usize> },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus coefficient {0} is not reduced mod p")]
    CoefficientOutOfRange(u32),
    #[error("field order {0} exceeds 2^16")]
    TooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("division by zero")]
    DivisionByZero,
}

/// An element of a [`FieldSpec`], identified by its integer code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0 as u32
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A validated finite field with its log/exp tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: FieldElement,
    /// `exp[i] = xi^i` for `i` in `[0, 2(q-1))`; doubled so products skip a reduction.
    exp: Vec<u16>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .field("primitive", &self.primitive)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`, `p` prime.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Dense polynomials over F_p, ascending coefficients.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let factor = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &c) in m.iter().enumerate() {
            let sub = (factor as u64 * c as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            if poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits(code: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    let mut c = code;
    for _ in 0..e {
        out.push(c % p);
        c /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn mul_via_modulus(a: u32, b: u32, p: u32, e: u32, modulus: &[u32]) -> u32 {
    let da = digits(a, p, e);
    let db = digits(b, p, e);
    let mut prod = vec![0u32; 2 * e as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, modulus, p);
    r.resize(e as usize, 0);
    undigits(&r, p)
}

/// Builds GF(p^e). Without a modulus the smallest irreducible monic polynomial
/// (ordered by its integer code) is used.
pub fn make_field(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<FieldSpec, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NonPrimeCharacteristic(p));
    }
    if e == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = (p as u64)
        .checked_pow(e)
        .filter(|&q| q <= MAX_ORDER as u64)
        .ok_or_else(|| FieldError::TooLarge((p as u64).saturating_pow(e)))? as u32;

    let modulus = match modulus {
        Some(m) => {
            if m.len() != e as usize + 1 {
                let mut t = m.to_vec();
                poly_trim(&mut t);
                return Err(FieldError::DegreeMismatch {
                    expected: e,
                    got: t.len().checked_sub(1),
                });
            }
            if let Some(&bad) = m.iter().find(|&&c| c >= p) {
                return Err(FieldError::CoefficientOutOfRange(bad));
            }
            if m[e as usize] != 1 {
                return Err(FieldError::NotMonic);
            }
            if !is_irreducible(m, p) {
                return Err(FieldError::ReducibleModulus(m.to_vec()));
            }
            m.to_vec()
        }
        None => default_modulus(p, e),
    };

    let primitive = (1..q)
        .find(|&g| multiplicative_order(g, p, e, &modulus) == q - 1)
        .expect("the multiplicative group of a finite field is cyclic");

    let order = (q - 1) as usize;
    let mut exp = Vec::with_capacity(2 * order);
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..order {
        exp.push(x as u16);
        log[x as usize] = i as u32;
        x = mul_via_modulus(x, primitive, p, e, &modulus);
    }
    for i in 0..order {
        exp.push(exp[i]);
    }

    Ok(FieldSpec {
        p,
        e,
        q,
        modulus,
        primitive: FieldElement(primitive as u16),
        exp,
        log,
    })
}

/// Smallest monic irreducible polynomial of degree `e` over F_p.
pub fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    (0..count)
        .map(|code| {
            let mut m = digits(code as u32, p, e);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

fn multiplicative_order(g: u32, p: u32, e: u32, modulus: &[u32]) -> u32 {
    let mut x = g;
    let mut order = 1;
    while x != 1 {
        x = mul_via_modulus(x, g, p, e, modulus);
        order += 1;
        if x == 0 {
            return 0;
        }
    }
    order
}

impl FieldSpec {
    /// GF(q) for a prime power `q`, optionally with an explicit modulus.
    pub fn with_order(q: u32, modulus: Option<&[u32]>) -> Result<FieldSpec, FieldError> {
        let (p, e) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        make_field(p, e, modulus)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive_element(&self) -> FieldElement {
        self.primitive
    }

    /// Element with the given code, if it is in range.
    pub fn element(&self, code: u32) -> Option<FieldElement> {
        (code < self.q).then_some(FieldElement(code as u16))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|c| FieldElement(c as u16))
    }

    /// `xi^i` for any integer exponent.
    pub fn xi_pow(&self, i: i64) -> FieldElement {
        let m = (self.q - 1) as i64;
        FieldElement(self.exp[i.rem_euclid(m) as usize])
    }

    /// Discrete log base `xi`, `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    pub fn exp_table(&self) -> &[u16] {
        &self.exp[..(self.q - 1) as usize]
    }

    pub fn log_table(&self) -> &[u32] {
        &self.log
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.e == 1 {
            return FieldElement(((a.0 as u32 + b.0 as u32) % self.p) as u16);
        }
        let (mut x, mut y) = (a.0 as u32, b.0 as u32);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElement(out as u16)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0 as u32;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElement(out as u16)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[s as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^n`; `0^0` is taken to be 1.
    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let l = self.log[a.0 as usize] as u64 * (n % (self.q as u64 - 1));
        FieldElement(self.exp[(l % (self.q as u64 - 1)) as usize])
    }

    /// Multiplies by a scalar `c in [0, p)` from the prime subfield.
    pub fn scale_prime(&self, a: FieldElement, c: u32) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for _ in 0..c % self.p {
            acc = self.add(acc, a);
        }
        acc
    }

    /// The `(q-1)^2` torus points `(xi^i, xi^j)`, row-major in `(i, j)`.
    ///
    /// Codeword coordinate `i * (q-1) + j` refers to this point.
    pub fn torus_points(&self) -> Vec<(FieldElement, FieldElement)> {
        let m = (self.q - 1) as i64;
        let mut pts = Vec::with_capacity((m * m) as usize);
        for i in 0..m {
            for j in 0..m {
                pts.push((self.xi_pow(i), self.xi_pow(j)));
            }
        }
        pts
    }
}
