//! Finite fields GF(p^k) with an explicit modulus polynomial.
//!
//! Elements are dense coefficient vectors (low-to-high). Every element also
//! has an integer index `c0 + c1 p + c2 p^2 + ...`, which is the enumeration
//! order used throughout the crate (zero first). The building construction
//! works on indices through [`FieldTables`].

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element does not belong to GF({p}^{k})")]
    ForeignElement { p: u32, k: u32 },
    #[error("field of order {0} is too large for lookup tables")]
    TooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A finite field GF(p^k) given by a monic irreducible modulus of degree k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    /// Monic modulus, low-to-high, length k + 1.
    modulus: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Builds the field of order `q`, which must be a prime power.
pub fn field_of_order(q: u64) -> Result<FieldSpec, GfError> {
    let p = (2..=q)
        .find(|d| q.is_multiple_of(*d))
        .ok_or(GfError::NotPrimePower(q))?;
    let (mut rest, mut k) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 || p > u32::MAX as u64 {
        return Err(GfError::NotPrimePower(q));
    }
    make_field(p as u32, k)
}

/// Builds GF(p^k) with the lexicographically smallest monic irreducible
/// modulus (coefficient tuples compared low-to-high).
pub fn make_field(p: u32, k: u32) -> Result<FieldSpec, GfError> {
    if !is_prime(p) {
        return Err(GfError::NonPrimeCharacteristic(p));
    }
    if k < 1 {
        return Err(GfError::InvalidDegree(k));
    }
    let k_us = k as usize;
    // Odometer over the k low coefficients with c0 most significant.
    let mut low = vec![0u32; k_us];
    loop {
        let mut candidate = low.clone();
        candidate.push(1);
        if is_irreducible(&candidate, p) {
            return Ok(FieldSpec {
                p,
                k,
                modulus: candidate,
            });
        }
        let mut pos = k_us;
        loop {
            if pos == 0 {
                // Irreducible polynomials exist in every degree.
                unreachable!("no monic irreducible polynomial of degree {k} over Z/{p}");
            }
            pos -= 1;
            low[pos] += 1;
            if low[pos] < p {
                break;
            }
            low[pos] = 0;
        }
    }
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let mut low = vec![0u32; d];
        loop {
            let mut divisor = low.clone();
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
            let mut pos = 0;
            loop {
                if pos == d {
                    break;
                }
                low[pos] += 1;
                if low[pos] < p {
                    break;
                }
                low[pos] = 0;
                pos += 1;
            }
            if pos == d {
                break;
            }
        }
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over Z/p.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    while r.len() > dm {
        let lead = r.pop().unwrap() % p64;
        if lead != 0 {
            let off = r.len() - dm;
            for (j, &mc) in m[..dm].iter().enumerate() {
                r[off + j] = (r[off + j] + (p64 - lead) * mc as u64) % p64;
            }
        }
    }
    r.resize(dm, 0);
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

impl FieldSpec {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of elements q = p^k.
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.k as usize],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.k as usize];
        coeffs[0] = 1 % self.p;
        FieldElement { coeffs }
    }

    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement, GfError> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(self.foreign());
        }
        Ok(FieldElement {
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn from_index(&self, mut index: u64) -> FieldElement {
        let mut coeffs = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            coeffs.push((index % self.p as u64) as u32);
            index /= self.p as u64;
        }
        FieldElement { coeffs }
    }

    pub fn index_of(&self, a: &FieldElement) -> u64 {
        a.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    fn foreign(&self) -> GfError {
        GfError::ForeignElement {
            p: self.p,
            k: self.k,
        }
    }

    fn check(&self, a: &FieldElement) -> Result<(), GfError> {
        if a.coeffs.len() != self.k as usize || a.coeffs.iter().any(|&c| c >= self.p) {
            return Err(self.foreign());
        }
        Ok(())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        Ok(FieldElement { coeffs })
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        let coeffs = a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect();
        Ok(FieldElement { coeffs })
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, GfError> {
        self.add(a, &self.neg(b)?)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        let k = self.k as usize;
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        Ok(FieldElement {
            coeffs: poly_rem(&prod, &self.modulus, self.p),
        })
    }

    /// Multiplicative inverse as a^(q-2).
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        self.pow(a, self.order() - 2)
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> Result<FieldElement, GfError> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            base = self.mul(&base, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// All q elements in index order, zero first.
    pub fn enumerate(&self) -> Vec<FieldElement> {
        (0..self.order()).map(|i| self.from_index(i)).collect()
    }

    /// Index-based lookup tables; available for q <= 256.
    pub fn tables(&self) -> Result<FieldTables, GfError> {
        FieldTables::new(self)
    }
}

pub fn enumerate_field(spec: &FieldSpec) -> Vec<FieldElement> {
    spec.enumerate()
}

/// Addition and multiplication tables over element indices.
#[derive(Debug, Clone)]
pub struct FieldTables {
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl FieldTables {
    fn new(spec: &FieldSpec) -> Result<Self, GfError> {
        let q = spec.order();
        if q > 256 {
            return Err(GfError::TooLarge(q));
        }
        let q = q as usize;
        let elems = spec.enumerate();
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for (i, a) in elems.iter().enumerate() {
            neg[i] = spec.index_of(&spec.neg(a)?) as u8;
            if i != 0 {
                inv[i] = spec.index_of(&spec.inv(a)?) as u8;
            }
            for (j, b) in elems.iter().enumerate() {
                add[i * q + j] = spec.index_of(&spec.add(a, b)?) as u8;
                mul[i * q + j] = spec.index_of(&spec.mul(a, b)?) as u8;
            }
        }
        Ok(FieldTables {
            q,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Inverse of a nonzero index; `inv(0)` is 0 and must not be relied on.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible_quadratics(p: u32) -> Vec<Vec<u32>> {
        // x^2 + b x + c is irreducible iff it has no root in Z/p.
        let mut out = Vec::new();
        for c in 0..p {
            for b in 0..p {
                let has_root = (0..p).any(|x| (x * x + b * x + c) % p == 0);
                if !has_root {
                    out.push(vec![c, b, 1]);
                }
            }
        }
        out
    }

    #[test]
    fn fields_by_order() {
        for (q, p, k) in [(2, 2, 1), (4, 2, 2), (7, 7, 1), (9, 3, 2), (8, 2, 3)] {
            let f = field_of_order(q).unwrap();
            assert_eq!((f.characteristic(), f.degree()), (p, k));
        }
        for q in [0, 1, 6, 12] {
            assert!(matches!(field_of_order(q), Err(GfError::NotPrimePower(_))));
        }
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = make_field(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.order(), 2);
    }

    #[test]
    fn quadratic_moduli_match_root_scan() {
        for p in [2, 3, 5, 7] {
            let expected = brute_irreducible_quadratics(p).into_iter().min().unwrap();
            assert_eq!(make_field(p, 2).unwrap().modulus(), expected.as_slice());
        }
        assert_eq!(make_field(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(make_field(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(4, 1), Err(GfError::NonPrimeCharacteristic(4)));
        assert_eq!(make_field(1, 1), Err(GfError::NonPrimeCharacteristic(1)));
        assert_eq!(make_field(3, 0), Err(GfError::InvalidDegree(0)));
    }

    #[test]
    fn gf4_products_and_inverses() {
        let f = make_field(2, 2).unwrap();
        let x = f.element(&[0, 1]).unwrap();
        assert_eq!(f.mul(&x, &x).unwrap(), f.element(&[1, 1]).unwrap());
        let f5 = make_field(5, 1).unwrap();
        let two = f5.element(&[2]).unwrap();
        assert_eq!(f5.inv(&two).unwrap(), f5.element(&[3]).unwrap());
        assert_eq!(f5.inv(&f5.zero()), Err(GfError::DivisionByZero));
    }

    #[test]
    fn enumeration_order() {
        let f = make_field(2, 2).unwrap();
        let e: Vec<Vec<u32>> = f.enumerate().iter().map(|a| a.coeffs().to_vec()).collect();
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(make_field(3, 2).unwrap().enumerate().len(), 9);
        assert_eq!(make_field(2, 1).unwrap().enumerate().len(), 2);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, k) in [
            (2, 1),
            (3, 1),
            (2, 2),
            (5, 1),
            (7, 1),
            (2, 3),
            (3, 2),
            (2, 4),
            (5, 2),
            (7, 2),
        ] {
            let f = make_field(p, k).unwrap();
            let t = f.tables().unwrap();
            let q = t.order();
            let all: Vec<u8> = (0..q).map(|i| i as u8).collect();
            for &a in &all {
                assert_eq!(t.add(a, t.neg(a)), 0);
                if a != 0 {
                    assert_eq!(t.mul(a, t.inv(a)), 1);
                    // a^(q-1) = 1
                    let mut acc = 1u8;
                    for _ in 0..q - 1 {
                        acc = t.mul(acc, a);
                    }
                    assert_eq!(acc, 1, "GF({p}^{k}) order of {a}");
                }
                for &b in &all {
                    assert_eq!(t.add(a, b), t.add(b, a));
                    assert_eq!(t.mul(a, b), t.mul(b, a));
                    for &c in &all {
                        assert_eq!(t.add(t.add(a, b), c), t.add(a, t.add(b, c)));
                        assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
                        assert_eq!(t.mul(a, t.add(b, c)), t.add(t.mul(a, b), t.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_construction() {
        assert_eq!(make_field(7, 2).unwrap(), make_field(7, 2).unwrap());
    }
}
