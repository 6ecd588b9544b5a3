//! Finite local rings `O_r`: either `Z/p^r` or `F_q[t]/(t^r)`.
//!
//! An element is a `u64` code in `[0, q^r)`. Writing the code in radix `b`
//! (`b = p` for `Z/p^r`, `b = q` for `F_q[t]/(t^r)`), digit `i` is the coefficient
//! of `π^i`. This makes the valuation, multiplication by `π`, exact division by
//! `π` and reduction mod `π^i` pure radix operations shared by both kinds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{self, FiniteField};

pub type RingElem = u64;

/// Maximum digit count supported by the fixed-size digit buffers.
const MAX_PRECISION: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    Padic,
    Laurent,
}

/// Parsed `zmod:p^r` / `ff:q^r` ring description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    pub kind: RingKind,
    pub q: u64,
    pub r: u32,
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::RingSpec(s.to_string());
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        let (q, r) = rest.split_once('^').ok_or_else(bad)?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        let r: u32 = r.trim().parse().map_err(|_| bad())?;
        let kind = match head.trim() {
            "zmod" => RingKind::Padic,
            "ff" => RingKind::Laurent,
            _ => return Err(bad()),
        };
        Ok(RingSpec { kind, q, r })
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.kind {
            RingKind::Padic => "zmod",
            RingKind::Laurent => "ff",
        };
        write!(f, "{head}:{}^{}", self.q, self.r)
    }
}

impl RingSpec {
    pub fn build(&self) -> Result<LocalRing> {
        match self.kind {
            RingKind::Padic => LocalRing::padic(self.q, self.r),
            RingKind::Laurent => {
                let (p, e) =
                    gf::prime_power(self.q).ok_or(Error::NotPrime(self.q))?;
                LocalRing::new(RingKind::Laurent, p, e, self.r)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocalRing {
    kind: RingKind,
    field: FiniteField,
    r: u32,
    base: u64,
    size: u64,
    /// `base^i` for `i = 0..=r`.
    pows: Vec<u64>,
}

impl LocalRing {
    /// `kind = Padic` requires `e = 1`.
    pub fn new(kind: RingKind, p: u64, e: u32, r: u32) -> Result<Self> {
        if !gf::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 || r as usize > MAX_PRECISION {
            return Err(Error::InvalidRing(format!(
                "precision r = {r} outside 1..={MAX_PRECISION}"
            )));
        }
        if kind == RingKind::Padic && e != 1 {
            return Err(Error::InvalidRing(format!(
                "Z/p^r has residue degree 1, got e = {e}"
            )));
        }
        let p32 = u32::try_from(p).map_err(|_| Error::InvalidRing(format!("p = {p} too large")))?;
        let field = FiniteField::new(p32, e)?;
        Self::with_field(kind, field, r)
    }

    /// `F_q[t]/(t^r)` with a caller-chosen field (e.g. a specific modulus).
    pub fn laurent_with_field(field: FiniteField, r: u32) -> Result<Self> {
        Self::with_field(RingKind::Laurent, field, r)
    }

    pub fn padic(p: u64, r: u32) -> Result<Self> {
        Self::new(RingKind::Padic, p, 1, r)
    }

    pub fn laurent(q: u64, r: u32) -> Result<Self> {
        let (p, e) = gf::prime_power(q).ok_or(Error::NotPrime(q))?;
        Self::new(RingKind::Laurent, p, e, r)
    }

    fn with_field(kind: RingKind, field: FiniteField, r: u32) -> Result<Self> {
        let base = field.order() as u64;
        let size = (base as u128).pow(r);
        if size >= 1u128 << 62 {
            return Err(crate::error::overflow("ring order q^r", size, 1u128 << 62));
        }
        let pows = (0..=r).map(|i| base.pow(i)).collect();
        Ok(Self {
            kind,
            field,
            r,
            base,
            size: size as u64,
            pows,
        })
    }

    /// Same ring family with a different precision.
    pub fn with_precision(&self, r: u32) -> Result<Self> {
        Self::with_field(self.kind, self.field.clone(), r)
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }
    pub fn p(&self) -> u64 {
        self.field.p() as u64
    }
    pub fn q(&self) -> u64 {
        self.base
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    pub fn field(&self) -> &FiniteField {
        &self.field
    }
    pub fn spec(&self) -> RingSpec {
        RingSpec {
            kind: self.kind,
            q: self.base,
            r: self.r,
        }
    }

    pub fn zero(&self) -> RingElem {
        0
    }
    pub fn one(&self) -> RingElem {
        1
    }
    /// The uniformizer (`p` or `t`); zero when `r = 1`.
    pub fn pi(&self) -> RingElem {
        self.pi_pow(1)
    }
    pub fn pi_pow(&self, k: u32) -> RingElem {
        if k >= self.r {
            0
        } else {
            self.pows[k as usize]
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> {
        0..self.size
    }

    pub fn from_int(&self, n: i64) -> RingElem {
        match self.kind {
            RingKind::Padic => n.rem_euclid(self.size as i64) as u64,
            RingKind::Laurent => self.field.from_int(n) as u64,
        }
    }

    /// Residue class in `F_q` (the constant digit).
    pub fn residue(&self, x: RingElem) -> u32 {
        (x % self.base) as u32
    }

    /// Digit `i` of the radix expansion.
    pub fn digit(&self, x: RingElem, i: u32) -> u32 {
        ((x / self.pows[i as usize]) % self.base) as u32
    }

    pub fn val(&self, x: RingElem) -> u32 {
        if x == 0 {
            return self.r;
        }
        let mut v = 0;
        let mut y = x;
        while y % self.base == 0 {
            y /= self.base;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, x: RingElem) -> bool {
        x % self.base != 0
    }

    /// Canonical representative of `x mod π^i`.
    pub fn reduce(&self, x: RingElem, i: u32) -> RingElem {
        if i >= self.r {
            x
        } else {
            x % self.pows[i as usize]
        }
    }

    pub fn mul_pi_pow(&self, x: RingElem, k: u32) -> RingElem {
        if k >= self.r {
            0
        } else {
            (x % self.pows[(self.r - k) as usize]) * self.pows[k as usize]
        }
    }

    /// `x / π^k` for `val(x) ≥ k`; the result is the representative whose top
    /// `k` digits vanish.
    pub fn div_pi_pow(&self, x: RingElem, k: u32) -> RingElem {
        debug_assert!(self.val(x) >= k);
        if k >= self.r {
            0
        } else {
            x / self.pows[k as usize]
        }
    }

    fn digits(&self, x: RingElem, out: &mut [u32; MAX_PRECISION]) {
        let mut y = x;
        for d in out.iter_mut().take(self.r as usize) {
            *d = (y % self.base) as u32;
            y /= self.base;
        }
    }

    fn pack(&self, d: &[u32; MAX_PRECISION]) -> RingElem {
        d[..self.r as usize]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.base + c as u64)
    }

    pub fn add(&self, a: RingElem, b: RingElem) -> RingElem {
        match self.kind {
            RingKind::Padic => {
                let s = a + b;
                if s >= self.size {
                    s - self.size
                } else {
                    s
                }
            }
            RingKind::Laurent => {
                let (mut da, mut db) = ([0; MAX_PRECISION], [0; MAX_PRECISION]);
                self.digits(a, &mut da);
                self.digits(b, &mut db);
                for i in 0..self.r as usize {
                    da[i] = self.field.add(da[i], db[i]);
                }
                self.pack(&da)
            }
        }
    }

    pub fn neg(&self, a: RingElem) -> RingElem {
        match self.kind {
            RingKind::Padic => {
                if a == 0 {
                    0
                } else {
                    self.size - a
                }
            }
            RingKind::Laurent => {
                let mut da = [0; MAX_PRECISION];
                self.digits(a, &mut da);
                for d in da.iter_mut().take(self.r as usize) {
                    *d = self.field.neg(*d);
                }
                self.pack(&da)
            }
        }
    }

    pub fn sub(&self, a: RingElem, b: RingElem) -> RingElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: RingElem, b: RingElem) -> RingElem {
        match self.kind {
            RingKind::Padic => ((a as u128 * b as u128) % self.size as u128) as u64,
            RingKind::Laurent => {
                let (mut da, mut db) = ([0; MAX_PRECISION], [0; MAX_PRECISION]);
                self.digits(a, &mut da);
                self.digits(b, &mut db);
                let r = self.r as usize;
                let mut out = [0u32; MAX_PRECISION];
                for i in 0..r {
                    if da[i] == 0 {
                        continue;
                    }
                    for j in 0..r - i {
                        out[i + j] = self.field.add(out[i + j], self.field.mul(da[i], db[j]));
                    }
                }
                self.pack(&out)
            }
        }
    }

    /// Inverse of a unit; `None` for non-units.
    pub fn inv(&self, a: RingElem) -> Option<RingElem> {
        if !self.is_unit(a) {
            return None;
        }
        Some(match self.kind {
            RingKind::Padic => {
                let (m, x) = (self.size as i128, a as i128);
                let (mut r0, mut r1, mut s0, mut s1) = (m, x, 0i128, 1i128);
                while r1 != 0 {
                    let t = r0 / r1;
                    (r0, r1) = (r1, r0 - t * r1);
                    (s0, s1) = (s1, s0 - t * s1);
                }
                s0.rem_euclid(m) as u64
            }
            RingKind::Laurent => {
                let mut da = [0; MAX_PRECISION];
                self.digits(a, &mut da);
                let f = &self.field;
                let a0inv = f.inv(da[0]);
                let mut c = [0u32; MAX_PRECISION];
                c[0] = a0inv;
                for k in 1..self.r as usize {
                    let mut s = 0;
                    for i in 1..=k {
                        s = f.add(s, f.mul(da[i], c[k - i]));
                    }
                    c[k] = f.neg(f.mul(a0inv, s));
                }
                self.pack(&c)
            }
        })
    }

    /// Some `t` with `t·b = a`, given `val(a) ≥ val(b)` and `b ≠ 0`.
    pub fn div_exact(&self, a: RingElem, b: RingElem) -> RingElem {
        let vb = self.val(b);
        debug_assert!(b != 0 && self.val(a) >= vb);
        let inv = self.inv(self.div_pi_pow(b, vb)).expect("unit part");
        self.mul(self.div_pi_pow(a, vb), inv)
    }

    /// Writes `x = π^v · u` and returns `(v, u)` with `u` a unit (`u = 1` for `x = 0`).
    pub fn split(&self, x: RingElem) -> (u32, RingElem) {
        if x == 0 {
            return (self.r, 1);
        }
        let v = self.val(x);
        (v, self.div_pi_pow(x, v))
    }

    /// Serializable view: an integer for `Z/p^r`, coefficient list for `F_q[t]/(t^r)`.
    pub fn to_json(&self, x: RingElem) -> serde_json::Value {
        match self.kind {
            RingKind::Padic => serde_json::json!(x),
            RingKind::Laurent => {
                serde_json::json!((0..self.r).map(|i| self.digit(x, i)).collect::<Vec<_>>())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_rings() -> Vec<LocalRing> {
        vec![
            LocalRing::padic(2, 3).unwrap(),
            LocalRing::padic(3, 2).unwrap(),
            LocalRing::padic(2, 8).unwrap(),
            LocalRing::laurent(2, 3).unwrap(),
            LocalRing::laurent(4, 2).unwrap(),
            LocalRing::laurent(3, 2).unwrap(),
            LocalRing::laurent(2, 8).unwrap(),
        ]
    }

    #[test]
    fn construction_examples() {
        let z4 = LocalRing::padic(2, 2).unwrap();
        assert_eq!((z4.size(), z4.q()), (4, 2));
        let f2t = LocalRing::laurent(2, 2).unwrap();
        assert_eq!((f2t.size(), f2t.q()), (4, 2));
        let f5 = LocalRing::padic(5, 1).unwrap();
        assert_eq!(f5.size(), 5);
        assert_eq!(f5.pi(), 0);
        assert!(matches!(LocalRing::padic(4, 1), Err(Error::NotPrime(4))));
        assert!(LocalRing::new(RingKind::Padic, 2, 2, 1).is_err());
    }

    #[test]
    fn valuation_examples() {
        let z8 = LocalRing::padic(2, 3).unwrap();
        assert_eq!(z8.val(6), 1);
        assert_eq!(z8.val(0), 3);
        let f = LocalRing::laurent(2, 3).unwrap();
        // t^2 + t has digits (0, 1, 1) → code 2 + 4
        assert_eq!(f.val(6), 1);
    }

    #[test]
    fn uniformizer_nilpotent() {
        for ring in small_rings() {
            assert_eq!(ring.pi_pow(ring.r()), 0);
            let mut x = ring.one();
            for _ in 0..ring.r() - 1 {
                x = ring.mul(x, ring.pi());
            }
            assert_ne!(x, 0);
            assert_eq!(ring.mul(x, ring.pi()), 0);
        }
    }

    #[test]
    fn valuation_of_products_exhaustive() {
        for ring in small_rings().into_iter().filter(|r| r.size() <= 256) {
            for x in ring.elements() {
                for y in ring.elements() {
                    let xy = ring.mul(x, y);
                    assert_eq!(ring.val(xy), (ring.val(x) + ring.val(y)).min(ring.r()));
                    if ring.is_unit(x) && ring.is_unit(y) {
                        assert!(ring.is_unit(xy));
                    }
                }
            }
        }
    }

    #[test]
    fn parse_specs() {
        let s: RingSpec = "zmod:2^3".parse().unwrap();
        assert_eq!((s.kind, s.q, s.r), (RingKind::Padic, 2, 3));
        let s: RingSpec = "ff:4^2".parse().unwrap();
        assert_eq!(s.build().unwrap().size(), 16);
        assert_eq!(s.to_string(), "ff:4^2");
        assert!("zmod:4^1".parse::<RingSpec>().unwrap().build().is_err());
        assert!("foo".parse::<RingSpec>().is_err());
        assert!("ff:6^1".parse::<RingSpec>().unwrap().build().is_err());
    }

    proptest! {
        #[test]
        fn ring_axioms(idx in 0usize..7, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let ring = &small_rings()[idx];
            let (a, b, c) = (a % ring.size(), b % ring.size(), c % ring.size());
            prop_assert_eq!(ring.add(a, b), ring.add(b, a));
            prop_assert_eq!(ring.mul(a, b), ring.mul(b, a));
            prop_assert_eq!(ring.mul(ring.mul(a, b), c), ring.mul(a, ring.mul(b, c)));
            prop_assert_eq!(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)));
            prop_assert_eq!(ring.sub(ring.add(a, b), b), a);
            if let Some(ai) = ring.inv(a) {
                prop_assert_eq!(ring.mul(a, ai), 1);
            }
            if b != 0 && ring.val(a) >= ring.val(b) {
                prop_assert_eq!(ring.mul(ring.div_exact(a, b), b), a);
            }
            let k = ring.val(a);
            prop_assert_eq!(ring.mul_pi_pow(ring.div_pi_pow(a, k), k), a);
            prop_assert_eq!(ring.mul(a, ring.pi()), ring.mul_pi_pow(a, 1));
        }
    }
}
