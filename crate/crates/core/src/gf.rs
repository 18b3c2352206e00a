//! Exact arithmetic in a finite field GF(p^N) given by a fixed irreducible
//! polynomial, together with the relative operations of a tower
//! GF(p) ⊆ GF(p^m) ⊆ GF(p^N).
//!
//! There is a single absolute representation: every element is a coefficient
//! vector over GF(p) in the power basis of the canonical root `g` of the
//! defining polynomial. Subfields are never re-represented; GF(p^m) is the
//! fixed set of `x ↦ x^{p^m}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported absolute degree N.
pub const MAX_DEGREE: usize = 16;

/// Largest subfield for which [`SubfieldTable`] lookup tables are built.
pub const MAX_TABLE_ORDER: u64 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("degree must be between 1 and {MAX_DEGREE}, got {0}")]
    BadDegree(usize),
    #[error("field order {0}^{1} does not fit in 64 bits")]
    TooLarge(u32, usize),
    #[error("defining polynomial must be monic of degree {expected}")]
    NotMonic { expected: usize },
    #[error("defining polynomial is reducible over GF({0})")]
    Reducible(u32),
    #[error("subfield degree {m} does not divide {n}")]
    NotADivisor { m: usize, n: usize },
    #[error("element has {got} coefficients, field degree is {degree}")]
    TooManyCoefficients { got: usize, degree: usize },
    #[error("element is zero")]
    Zero,
    #[error("element does not lie in GF({p}^{m})")]
    NotInSubfield { p: u32, m: usize },
    #[error("square classes are trivial in characteristic 2")]
    EvenCharacteristic,
    #[error("subfield GF({0}) is too large for lookup tables")]
    TableTooLarge(u64),
}

/// An element of GF(p^N): little-endian coefficients in the power basis of
/// the defining root. Coefficients past the field degree are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: [u8; MAX_DEGREE],
}

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement {
        coeffs: [0; MAX_DEGREE],
    };

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Raw coefficient `i` (zero beyond the field degree).
    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0) as u32
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let len = self
            .coeffs
            .iter()
            .rposition(|&c| c != 0)
            .map_or(1, |i| i + 1);
        f.debug_list().entries(&self.coeffs[..len]).finish()
    }
}

/// F = GF(p^m) inside GF(p^N), identified by `m | N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subfield {
    m: usize,
}

impl Subfield {
    pub fn degree(&self) -> usize {
        self.m
    }
}

/// Square class of a nonzero element of an odd-order field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SquareClass {
    Square,
    Nonsquare,
}

/// A finite field GF(p^N) with a fixed monic irreducible defining polynomial.
#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    degree: usize,
    /// Little-endian, length `degree + 1`, leading coefficient 1.
    poly: Vec<u32>,
    order: u64,
    tables: Arc<[OnceLock<Arc<SubfieldTable>>; MAX_DEGREE + 1]>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("poly", &self.poly)
            .finish()
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.poly == other.poly
    }
}

impl Eq for GaloisField {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of `n`.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes a prime power `q` as `(p, m)` with `q = p^m`.
pub fn prime_power(q: u64) -> Option<(u32, usize)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut m = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        m += 1;
    }
    Some((u32::try_from(p).ok()?, m))
}

impl GaloisField {
    /// Creates GF(p^N). Without `poly`, the defining polynomial is the monic
    /// irreducible of degree N whose non-leading coefficients, read as a
    /// base-p integer `Σ cᵢ pⁱ`, are smallest.
    pub fn new(p: u32, degree: usize, poly: Option<&[u32]>) -> Result<Self, FieldError> {
        if !is_prime(p) || p > 255 {
            return Err(FieldError::NotPrime(p));
        }
        if degree == 0 || degree > MAX_DEGREE {
            return Err(FieldError::BadDegree(degree));
        }
        let order = (p as u64)
            .checked_pow(degree as u32)
            .filter(|o| *o < (1u64 << 62))
            .ok_or(FieldError::TooLarge(p, degree))?;
        let poly = match poly {
            Some(given) => {
                if given.len() != degree + 1 || given[degree] % p != 1 {
                    return Err(FieldError::NotMonic { expected: degree });
                }
                let reduced: Vec<u32> = given.iter().map(|c| c % p).collect();
                if !poly::is_irreducible(&reduced, p) {
                    return Err(FieldError::Reducible(p));
                }
                reduced
            }
            None => poly::smallest_irreducible(p, degree),
        };
        Ok(GaloisField {
            p,
            degree,
            poly,
            order,
            tables: Arc::new(std::array::from_fn(|_| OnceLock::new())),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_char_two(&self) -> bool {
        self.p == 2
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let mut e = FieldElement::ZERO;
        e.coeffs[0] = n.rem_euclid(self.p as i64) as u8;
        e
    }

    /// The canonical root `g` of the defining polynomial.
    pub fn root(&self) -> FieldElement {
        if self.degree == 1 {
            // x + c with root −c
            return self.from_int(-(self.poly[0] as i64));
        }
        let mut e = FieldElement::ZERO;
        e.coeffs[1] = 1;
        e
    }

    /// Builds an element from little-endian coefficients, reducing mod p.
    pub fn element(&self, coeffs: &[i64]) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.degree {
            return Err(FieldError::TooManyCoefficients {
                got: coeffs.len(),
                degree: self.degree,
            });
        }
        let mut e = FieldElement::ZERO;
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *slot = c.rem_euclid(self.p as i64) as u8;
        }
        Ok(e)
    }

    /// Coefficients of `x`, length exactly N.
    pub fn coeffs(&self, x: &FieldElement) -> Vec<u32> {
        x.coeffs[..self.degree].iter().map(|&c| c as u32).collect()
    }

    /// Position of `x` in the enumeration order `Σ cᵢ pⁱ`.
    pub fn index_of(&self, x: &FieldElement) -> u64 {
        x.coeffs[..self.degree]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    pub fn element_at(&self, mut index: u64) -> FieldElement {
        let mut e = FieldElement::ZERO;
        for slot in e.coeffs.iter_mut().take(self.degree) {
            *slot = (index % self.p as u64) as u8;
            index /= self.p as u64;
        }
        e
    }

    /// All elements in index order; zero first, one second.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p as u16;
        let mut e = FieldElement::ZERO;
        for i in 0..self.degree {
            e.coeffs[i] = ((a.coeffs[i] as u16 + b.coeffs[i] as u16) % p) as u8;
        }
        e
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let p = self.p as u16;
        let mut e = FieldElement::ZERO;
        for i in 0..self.degree {
            e.coeffs[i] = ((p - a.coeffs[i] as u16) % p) as u8;
        }
        e
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let n = self.degree;
        let p = self.p;
        let mut prod = [0u32; 2 * MAX_DEGREE];
        for i in 0..n {
            let ai = a.coeffs[i] as u32;
            if ai == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] += ai * b.coeffs[j] as u32;
            }
        }
        for c in prod.iter_mut().take(2 * n - 1) {
            *c %= p;
        }
        for k in (n..2 * n - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for t in 0..n {
                let r = self.poly[t];
                if r != 0 {
                    prod[k - n + t] = (prod[k - n + t] + c * (p - r)) % p;
                }
            }
        }
        let mut e = FieldElement::ZERO;
        for i in 0..n {
            e.coeffs[i] = prod[i] as u8;
        }
        e
    }

    pub fn pow(&self, x: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = *x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: &FieldElement) -> Option<FieldElement> {
        if x.is_zero() {
            None
        } else {
            Some(self.pow(x, self.order - 2))
        }
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Option<FieldElement> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// `x^{p^k}`; the exponent is taken modulo N.
    pub fn frobenius_power(&self, x: &FieldElement, k: usize) -> FieldElement {
        let mut y = *x;
        for _ in 0..(k % self.degree) {
            y = self.pow(&y, self.p as u64);
        }
        y
    }

    pub fn subfield(&self, m: usize) -> Result<Subfield, FieldError> {
        if m == 0 || !self.degree.is_multiple_of(m) {
            return Err(FieldError::NotADivisor { m, n: self.degree });
        }
        Ok(Subfield { m })
    }

    /// The whole field as a subfield of itself.
    pub fn full(&self) -> Subfield {
        Subfield { m: self.degree }
    }

    /// `q = p^m`.
    pub fn subfield_order(&self, sub: Subfield) -> u64 {
        (self.p as u64).pow(sub.m as u32)
    }

    /// `[K : F] = N / m`.
    pub fn relative_degree(&self, sub: Subfield) -> usize {
        self.degree / sub.m
    }

    /// `Σ_{i<w} x^{q^i}`.
    pub fn relative_trace(&self, x: &FieldElement, sub: Subfield) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut term = *x;
        for _ in 0..self.relative_degree(sub) {
            acc = self.add(&acc, &term);
            term = self.frobenius_power(&term, sub.m);
        }
        acc
    }

    /// `x^{(q^w − 1)/(q − 1)}`.
    pub fn relative_norm(&self, x: &FieldElement, sub: Subfield) -> FieldElement {
        let q = self.subfield_order(sub);
        self.pow(x, (self.order - 1) / (q - 1))
    }

    pub fn is_in_subfield(&self, x: &FieldElement, sub: Subfield) -> bool {
        self.frobenius_power(x, sub.m) == *x
    }

    pub fn square_class(&self, x: &FieldElement, sub: Subfield) -> Result<SquareClass, FieldError> {
        if self.p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if x.is_zero() {
            return Err(FieldError::Zero);
        }
        if !self.is_in_subfield(x, sub) {
            return Err(FieldError::NotInSubfield {
                p: self.p,
                m: sub.m,
            });
        }
        let q = self.subfield_order(sub);
        if self.pow(x, (q - 1) / 2) == self.one() {
            Ok(SquareClass::Square)
        } else {
            Ok(SquareClass::Nonsquare)
        }
    }

    /// `{1, g, …, g^{w−1}}` for the canonical root `g`, a basis of K over F.
    pub fn subfield_power_basis(&self, sub: Subfield) -> Vec<FieldElement> {
        let g = self.root();
        let mut out = Vec::with_capacity(self.relative_degree(sub));
        let mut cur = self.one();
        for _ in 0..self.relative_degree(sub) {
            out.push(cur);
            cur = self.mul(&cur, &g);
        }
        out
    }

    /// Elements of F in index order.
    pub fn subfield_elements(&self, sub: Subfield) -> Vec<FieldElement> {
        self.elements()
            .filter(|x| self.is_in_subfield(x, sub))
            .collect()
    }

    pub fn multiplicative_order(&self, x: &FieldElement) -> Option<u64> {
        if x.is_zero() {
            return None;
        }
        let mut ord = self.order - 1;
        for r in prime_factors(self.order - 1) {
            while ord.is_multiple_of(r) && self.pow(x, ord / r) == self.one() {
                ord /= r;
            }
        }
        Some(ord)
    }

    /// The first element in index order that generates K*.
    pub fn primitive_element(&self) -> FieldElement {
        self.elements()
            .find(|x| self.multiplicative_order(x) == Some(self.order - 1))
            .expect("finite field has a primitive element")
    }

    /// Lookup tables for F, built once per subfield and cached.
    pub fn subfield_table(&self, sub: Subfield) -> Result<Arc<SubfieldTable>, FieldError> {
        let q = self.subfield_order(sub);
        if q > MAX_TABLE_ORDER {
            return Err(FieldError::TableTooLarge(q));
        }
        Ok(self.tables[sub.m]
            .get_or_init(|| Arc::new(SubfieldTable::build(self, sub)))
            .clone())
    }
}

/// Index-based arithmetic tables for a small subfield F, used by the
/// exhaustive enumerations. Index 0 is zero and index 1 is one.
#[derive(Debug)]
pub struct SubfieldTable {
    pub(crate) q: usize,
    pub(crate) elements: Vec<FieldElement>,
    index: HashMap<FieldElement, u16>,
    add: Vec<u16>,
    mul: Vec<u16>,
}

impl SubfieldTable {
    fn build(field: &GaloisField, sub: Subfield) -> Self {
        let elements = field.subfield_elements(sub);
        let q = elements.len();
        let index: HashMap<FieldElement, u16> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as u16))
            .collect();
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                add[i * q + j] = index[&field.add(a, b)];
                mul[i * q + j] = index[&field.mul(a, b)];
            }
        }
        SubfieldTable {
            q,
            elements,
            index,
            add,
            mul,
        }
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn element(&self, i: u16) -> FieldElement {
        self.elements[i as usize]
    }

    pub fn index(&self, x: &FieldElement) -> Option<u16> {
        self.index.get(x).copied()
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }
}

/// Polynomials over GF(p), little-endian `Vec<u32>`, used only to pick and
/// validate defining polynomials.
mod poly {
    fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r: Vec<u32> = a.to_vec();
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
            let k = r.len() - 1;
            let c = r[k] * lead_inv % p;
            if c != 0 {
                for t in 0..=dm {
                    let idx = k - dm + t;
                    r[idx] = (r[idx] + (p - c) * m[t] % p) % p;
                }
            }
            r.pop();
            if r.is_empty() {
                r.push(0);
            }
        }
        trim(r)
    }

    fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut prod = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !(b.len() == 1 && b[0] == 0) {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^{p^k} mod f`.
    fn frobenius_x(k: usize, f: &[u32], p: u32) -> Vec<u32> {
        let mut y = vec![0, 1];
        for _ in 0..k {
            y = pow_mod(&y, p as u64, f, p);
        }
        y
    }

    fn sub_x(a: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        if a.len() < 2 {
            a.resize(2, 0);
        }
        a[1] = (a[1] + p - 1) % p;
        trim(a)
    }

    /// Rabin: f of degree n is irreducible iff x^{p^n} ≡ x (mod f) and
    /// gcd(x^{p^{n/r}} − x, f) = 1 for each prime r | n.
    pub(super) fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        if n == 1 {
            return true;
        }
        if !(sub_x(&frobenius_x(n, f, p), p).iter().all(|&c| c == 0)) {
            return false;
        }
        for r in super::prime_factors(n as u64) {
            let h = sub_x(&frobenius_x(n / r as usize, f, p), p);
            let g = gcd(f, &h, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    pub(super) fn smallest_irreducible(p: u32, n: usize) -> Vec<u32> {
        let count = (p as u64).pow(n as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(n + 1);
            let mut r = idx;
            for _ in 0..n {
                f.push((r % p as u64) as u32);
                r /= p as u64;
            }
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}
