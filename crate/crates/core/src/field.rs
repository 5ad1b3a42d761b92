//! Table-driven arithmetic in GF(p^h) for q <= 32.
//!
//! Elements are dense integers in `[0, q)`: the value `sum c_i p^i` encodes
//! the polynomial `sum c_i x^i` reduced modulo the field's defining
//! polynomial. Every operation is a single table lookup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A field element encoded as its base-p digit vector.
pub type FieldElement = u8;

/// Largest supported field order.
pub const MAX_Q: u32 = 32;

/// Row stride of the q x q tables; fixed so that `(a << 5) | b` indexes them.
const STRIDE: usize = 32;

/// Characteristic, degree and defining polynomial of a finite field.
///
/// `modulus` lists coefficients low-degree first and includes the leading 1,
/// so it has `h + 1` entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub h: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn new(p: u32, h: u32, modulus: Vec<u32>) -> Self {
        FieldSpec { p, h, modulus }
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.h)
    }

    /// Default field of order `q`: `x^2+1` for GF(9), `x^4+x+1` for GF(16) and,
    /// in general, the irreducible monic polynomial whose lower coefficients
    /// form the smallest base-p number. Prime fields use the modulus `x`.
    pub fn for_order(q: u32) -> Result<Self> {
        let (p, h) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(Error::FieldTooLarge { p, h });
        }
        if h == 1 {
            return Ok(FieldSpec::new(p, 1, vec![0, 1]));
        }
        let count = p.pow(h);
        for code in 0..count {
            let mut modulus = digits(code, p, h as usize);
            modulus.push(1);
            if find_factor(&modulus, p).is_none() {
                return Ok(FieldSpec::new(p, h, modulus));
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    /// Human readable modulus, e.g. `x^4+x+1`.
    pub fn modulus_string(&self) -> String {
        poly_string(&self.modulus)
    }
}

/// Returns `(p, h)` with `q = p^h` if `q >= 2` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut h = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        h += 1;
    }
    (rest == 1).then_some((p, h))
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn digits(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

fn poly_string(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        let term = match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - lead * c % p) % p;
            }
        }
        r.pop();
    }
    while r.len() > 1 && *r.last().unwrap() == 0 {
        r.pop();
    }
    r
}

/// Smallest monic factor of degree `1..=deg/2`, found by trial division.
fn find_factor(modulus: &[u32], p: u32) -> Option<Vec<u32>> {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d as u32) {
            let mut f = digits(code, p, d);
            f.push(1);
            let r = poly_rem(modulus, &f, p);
            if r.iter().all(|&c| c == 0) {
                return Some(f);
            }
        }
    }
    None
}

/// Precomputed arithmetic for one finite field.
#[derive(Clone, Debug)]
pub struct FieldTable {
    spec: FieldSpec,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    /// `frob[e][x] = x^(p^e)` for `e` in `0..h`.
    frob: Vec<Vec<u8>>,
}

impl FieldTable {
    /// Validates `spec` and builds all tables.
    pub fn build(spec: FieldSpec) -> Result<Self> {
        let FieldSpec { p, h, .. } = spec;
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if h == 0 || p.checked_pow(h).is_none_or(|q| q > MAX_Q) {
            return Err(Error::FieldTooLarge { p, h });
        }
        let m = &spec.modulus;
        if m.len() != h as usize + 1 || *m.last().unwrap() != 1 {
            return Err(Error::BadModulusDegree { expected: h, got: m.clone() });
        }
        if let Some(&c) = m.iter().find(|&&c| c >= p) {
            return Err(Error::BadCoefficient(c));
        }
        if let Some(factor) = find_factor(m, p) {
            return Err(Error::ReducibleModulus { modulus: m.clone(), factor });
        }

        let q = spec.q() as usize;
        let hh = h as usize;
        let polys: Vec<Vec<u32>> = (0..q as u32).map(|v| digits(v, p, hh)).collect();
        let encode = |c: &[u32]| -> u8 {
            c.iter().rev().fold(0u32, |acc, &d| acc * p + d) as u8
        };

        let mut add = vec![0u8; STRIDE * STRIDE];
        let mut mul = vec![0u8; STRIDE * STRIDE];
        for a in 0..q {
            for b in 0..q {
                let sum: Vec<u32> = (0..hh).map(|i| (polys[a][i] + polys[b][i]) % p).collect();
                add[a * STRIDE + b] = encode(&sum);

                let mut prod = vec![0u32; 2 * hh - 1];
                for i in 0..hh {
                    for j in 0..hh {
                        prod[i + j] = (prod[i + j] + polys[a][i] * polys[b][j]) % p;
                    }
                }
                let mut r = if hh == 1 { prod } else { poly_rem(&prod, m, p) };
                r.resize(hh, 0);
                mul[a * STRIDE + b] = encode(&r);
            }
        }

        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            for b in 0..q {
                if add[a * STRIDE + b] == 0 {
                    neg[a] = b as u8;
                }
                if mul[a * STRIDE + b] == 1 {
                    inv[a] = b as u8;
                }
            }
        }

        let mut frob = vec![(0..q as u8).collect::<Vec<u8>>()];
        for e in 1..hh {
            let prev = &frob[e - 1];
            let next: Vec<u8> = prev
                .iter()
                .map(|&x| {
                    let mut acc = 1u8;
                    for _ in 0..p {
                        acc = mul[acc as usize * STRIDE + x as usize];
                    }
                    acc
                })
                .collect();
            frob.push(next);
        }

        Ok(FieldTable { spec, q, add, mul, neg, inv, frob })
    }

    /// Shorthand for `build(FieldSpec::for_order(q)?)`.
    pub fn for_order(q: u32) -> Result<Self> {
        Self::build(FieldSpec::for_order(q)?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    #[inline]
    pub fn h(&self) -> u32 {
        self.spec.h
    }

    #[inline(always)]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add[((a as usize) << 5) | b as usize]
    }

    #[inline(always)]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg[b as usize])
    }

    #[inline(always)]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul[((a as usize) << 5) | b as usize]
    }

    #[inline(always)]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `inv(0)` returns 0 and callers must not rely on it.
    #[inline(always)]
    pub fn inv(&self, a: FieldElement) -> FieldElement {
        debug_assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    /// `x^(p^e)`, for `e` in `0..h`.
    #[inline(always)]
    pub fn frobenius_power(&self, x: FieldElement, e: u32) -> FieldElement {
        self.frob[e as usize][x as usize]
    }

    pub fn pow(&self, x: FieldElement, mut n: u64) -> FieldElement {
        let mut base = x;
        let mut acc = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: FieldElement) -> usize {
        assert!(x != 0);
        let mut acc = x;
        let mut n = 1;
        while acc != 1 {
            acc = self.mul(acc, x);
            n += 1;
        }
        n
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        0..self.q as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORDERS: [u32; 16] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 32];

    #[test]
    fn gf9_defining_relation() {
        let f = FieldTable::build(FieldSpec::new(3, 2, vec![1, 0, 1])).unwrap();
        // "x" encodes as 0 + 1*3 = 3
        assert_eq!(f.mul(3, 3), 2);
    }

    #[test]
    fn gf16_defining_relation() {
        let f = FieldTable::build(FieldSpec::new(2, 4, vec![1, 1, 0, 0, 1])).unwrap();
        let x = 2u8;
        let x4 = f.mul(f.mul(x, x), f.mul(x, x));
        assert_eq!(x4, 3); // x + 1
    }

    #[test]
    fn gf7_inverse() {
        let f = FieldTable::for_order(7).unwrap();
        assert_eq!(f.inv(3), 5);
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldSpec::for_order(9).unwrap().modulus, vec![1, 0, 1]);
        assert_eq!(FieldSpec::for_order(16).unwrap().modulus, vec![1, 1, 0, 0, 1]);
        assert_eq!(FieldSpec::for_order(4).unwrap().modulus, vec![1, 1, 1]);
        assert_eq!(FieldSpec::for_order(8).unwrap().modulus, vec![1, 1, 0, 1]);
        assert_eq!(FieldSpec::for_order(11).unwrap().modulus, vec![0, 1]);
        assert_eq!(FieldSpec::for_order(16).unwrap().modulus_string(), "x^4+x+1");
    }

    #[test]
    fn rejects_reducible_and_malformed() {
        let err = FieldTable::build(FieldSpec::new(3, 2, vec![2, 0, 1])).unwrap_err();
        // x^2 + 2 = (x+1)(x+2) over GF(3)
        assert!(matches!(err, Error::ReducibleModulus { .. }), "{err}");
        assert!(matches!(
            FieldTable::build(FieldSpec::new(2, 4, vec![1, 0, 1])),
            Err(Error::BadModulusDegree { .. })
        ));
        assert!(matches!(FieldTable::build(FieldSpec::new(6, 1, vec![0, 1])), Err(Error::NotPrime(6))));
        assert!(matches!(FieldSpec::for_order(12), Err(Error::NotPrimePower(12))));
        assert!(matches!(FieldSpec::for_order(49), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn reducible_factor_reported() {
        match FieldTable::build(FieldSpec::new(2, 4, vec![1, 0, 0, 0, 1])) {
            // x^4 + 1 = (x+1)^4
            Err(Error::ReducibleModulus { factor, .. }) => assert_eq!(factor, vec![1, 1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in ORDERS {
            let f = FieldTable::for_order(q).unwrap();
            let els: Vec<u8> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic() {
        for q in ORDERS {
            let f = FieldTable::for_order(q).unwrap();
            assert!(f.elements().skip(1).any(|x| f.order(x) == q as usize - 1), "q={q}");
        }
    }

    #[test]
    fn frobenius_is_an_automorphism() {
        for q in ORDERS {
            let f = FieldTable::for_order(q).unwrap();
            let h = f.h();
            for e in 0..h {
                for a in f.elements() {
                    for b in f.elements() {
                        let fa = f.frobenius_power(a, e);
                        let fb = f.frobenius_power(b, e);
                        assert_eq!(f.frobenius_power(f.add(a, b), e), f.add(fa, fb));
                        assert_eq!(f.frobenius_power(f.mul(a, b), e), f.mul(fa, fb));
                    }
                }
            }
            // h applications of x -> x^p is the identity
            for a in f.elements() {
                let mut x = a;
                for _ in 0..h {
                    x = f.frobenius_power(x, 1 % h);
                }
                assert_eq!(x, a);
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        let f9 = FieldTable::for_order(9).unwrap();
        assert_eq!(f9.frobenius_power(3, 1), f9.pow(3, 3));
        assert_eq!(f9.frobenius_power(2, 1), 2);
        let f16 = FieldTable::for_order(16).unwrap();
        let x = 2u8;
        assert_eq!(f16.frobenius_power(x, 2), 3);
        assert_eq!(f16.frobenius_power(f16.frobenius_power(x, 1), 1), 3);
        for a in f16.elements() {
            assert_eq!(f16.frobenius_power(a, 0), a);
        }
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(32), Some((2, 5)));
        assert_eq!(prime_power(23), Some((23, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }
}
