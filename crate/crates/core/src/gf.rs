//! Prime-power fields `F_q = F_p[x]/(f)` with full lookup tables.
//!
//! Elements are encoded as integers in `[0, q)` whose base-`p` digits are the
//! coefficients of the residue polynomial (digit `i` is the coefficient of
//! `x^i`). For `e = 1` this is ordinary arithmetic mod `p`.

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u32 = 1024;

#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^e` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while q % p != 0 {
        p += 1;
    }
    let (mut m, mut e) = (q, 0u32);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    // den monic
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                let t = (r[shift + i] + p - (lead * c) % p) % p;
                r[shift + i] = t;
            }
        }
        r.pop();
    }
    r
}

fn monic_from_index(idx: u32, deg: u32, p: u32) -> Vec<u32> {
    let mut c = Vec::with_capacity(deg as usize + 1);
    let mut k = idx;
    for _ in 0..deg {
        c.push(k % p);
        k /= p;
    }
    c.push(1);
    c
}

/// Irreducibility by trial division with every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() as u32 - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for idx in 0..p.pow(d) {
            let g = monic_from_index(idx, d, p);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The smallest monic irreducible polynomial of degree `e` over `F_p`, ordering the
/// candidates by the integer `sum c_i p^i` of their non-leading coefficients.
pub fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    (0..p.pow(e))
        .map(|idx| monic_from_index(idx, e, p))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

impl FiniteField {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::InvalidRing("field degree must be at least 1".into()));
        }
        Self::with_modulus(p, least_irreducible(p, e))
    }

    /// Builds `F_p[x]/(f)` for a monic `f` given by ascending coefficients.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidRing(format!(
                "modulus {modulus:?} must be monic with coefficients below {p}"
            )));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::Reducible { coeffs: modulus, p });
        }
        let e = modulus.len() as u32 - 1;
        let q = (p as u64).pow(e);
        if q > MAX_FIELD_ORDER as u64 {
            return Err(Error::InvalidRing(format!(
                "field order {q} exceeds table limit {MAX_FIELD_ORDER}"
            )));
        }
        let q = q as u32;
        let digits = |a: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(e as usize);
            let mut k = a;
            for _ in 0..e {
                v.push(k % p);
                k /= p;
            }
            v
        };
        let pack = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let n = q as usize;
        let mut add = vec![0u16; n * n];
        let mut mul = vec![0u16; n * n];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = pack(&s) as u16;
                let mut prod = vec![0u32; 2 * e as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut red = poly_rem(&prod, &modulus, p);
                red.resize(e as usize, 0);
                mul[(a * q + b) as usize] = pack(&red) as u16;
            }
        }
        let mut neg = vec![0u16; n];
        let mut inv = vec![0u16; n];
        for a in 0..q {
            for b in 0..q {
                if add[(a * q + b) as usize] == 0 {
                    neg[a as usize] = b as u16;
                }
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u16;
                }
            }
        }
        Ok(Self {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn p(&self) -> u32 {
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

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize] as u32
    }
    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize] as u32
    }
    /// Inverse of a nonzero element; `inv(0)` is 0.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize] as u32
    }
    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn f4_uses_x2_x_1() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x * x = x + 1
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (5, 1)] {
            let f = FiniteField::new(p, e).unwrap();
            let q = f.order();
            for a in 0..q {
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(matches!(
            FiniteField::with_modulus(2, vec![1, 0, 1]),
            Err(Error::Reducible { .. })
        ));
        assert!(matches!(FiniteField::new(4, 1), Err(Error::NotPrime(4))));
    }
}
