//! Gaussian integers and 3×3 matrices over `Z[i]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gaussian {
    pub re: i64,
    pub im: i64,
}

impl Gaussian {
    pub const ZERO: Self = Self { re: 0, im: 0 };
    pub const ONE: Self = Self { re: 1, im: 0 };
    pub const I: Self = Self { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn norm(self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    /// `self / d` if `d` divides `self`.
    pub fn div_exact(self, d: Self) -> Option<Self> {
        let n = d.norm();
        let t = self * d.conj();
        (n != 0 && t.re % n == 0 && t.im % n == 0).then(|| Self::new(t.re / n, t.im / n))
    }

    /// Division rounding to the nearest Gaussian integer, so the remainder
    /// has smaller norm than `d`.
    fn div_round(self, d: Self) -> Self {
        let n = d.norm();
        let t = self * d.conj();
        let round = |x: i64| (2 * x + n).div_euclid(2 * n);
        Self::new(round(t.re), round(t.im))
    }

    pub fn gcd(mut a: Self, mut b: Self) -> Self {
        while !b.is_zero() {
            let r = a - b * a.div_round(b);
            a = b;
            b = r;
        }
        a.associate().0
    }

    /// The associate `u·self` with `re > 0, im ≥ 0` (zero maps to itself),
    /// together with the unit `u`.
    pub fn associate(self) -> (Self, Self) {
        let mut u = Self::ONE;
        let mut z = self;
        if z.is_zero() {
            return (z, u);
        }
        while !(z.re > 0 && z.im >= 0) {
            z = z * Self::I;
            u = u * Self::I;
        }
        (z, u)
    }

    /// Valuation at the Gaussian prime `pi`.
    pub fn ord(mut self, pi: Self) -> u32 {
        assert!(!self.is_zero(), "valuation of zero");
        let mut k = 0;
        while let Some(x) = self.div_exact(pi) {
            self = x;
            k += 1;
        }
        k
    }

    /// Image under `i ↦ eps` in `F_q`.
    pub fn reduce(self, q: u64, eps: u64) -> u64 {
        let q = q as i64;
        (self.re + self.im * eps as i64).rem_euclid(q) as u64
    }
}

impl Add for Gaussian {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Gaussian {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Gaussian {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for Gaussian {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}i"),
            (a, b) if b < 0 => write!(f, "{a}{b}i"),
            (a, b) => write!(f, "{a}+{b}i"),
        }
    }
}

/// Row-major 3×3 matrix over `Z[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GMatrix(pub [Gaussian; 9]);

impl GMatrix {
    pub fn identity() -> Self {
        let mut m = [Gaussian::ZERO; 9];
        for i in 0..3 {
            m[i * 4] = Gaussian::ONE;
        }
        Self(m)
    }

    pub fn from_columns(c: [[Gaussian; 3]; 3]) -> Self {
        let mut m = [Gaussian::ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                m[i * 3 + j] = c[j][i];
            }
        }
        Self(m)
    }

    pub fn get(&self, i: usize, j: usize) -> Gaussian {
        self.0[i * 3 + j]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = [Gaussian::ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                m[j * 3 + i] = self.get(i, j).conj();
            }
        }
        Self(m)
    }

    pub fn det(&self) -> Gaussian {
        let g = |i, j| self.get(i, j);
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    }

    pub fn is_scalar(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.get(i, j).is_zero()))
            && self.get(0, 0) == self.get(1, 1)
            && self.get(1, 1) == self.get(2, 2)
            && !self.get(0, 0).is_zero()
    }

    /// Canonical representative of the class in `PGL_3(Q(i))`: entries divided
    /// by their gcd, then the first nonzero entry made an associate with
    /// `re > 0, im ≥ 0`.
    pub fn projective_key(&self) -> Self {
        let g = self.0.iter().fold(Gaussian::ZERO, |g, &x| Gaussian::gcd(g, x));
        let m = self.0.map(|x| x.div_exact(g).expect("gcd divides"));
        let first = m.iter().copied().find(|x| !x.is_zero()).expect("nonzero matrix");
        let (_, u) = first.associate();
        Self(m.map(|x| x * u))
    }

    /// Image in `M_3(F_q)` under `i ↦ eps`, row-major.
    pub fn reduce(&self, q: u64, eps: u64) -> [u64; 9] {
        self.0.map(|x| x.reduce(q, eps))
    }
}

impl Mul for GMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = [Gaussian::ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                m[i * 3 + j] = (0..3).fold(Gaussian::ZERO, |acc, k| acc + self.get(i, k) * o.get(k, j));
            }
        }
        Self(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_division() {
        let a = Gaussian::new(1, 2) * Gaussian::new(3, 2);
        let b = Gaussian::new(1, 2) * Gaussian::new(1, 1);
        assert_eq!(Gaussian::gcd(a, b), Gaussian::new(1, 2).associate().0);
        assert_eq!(a.div_exact(Gaussian::new(3, 2)), Some(Gaussian::new(1, 2)));
        assert_eq!(Gaussian::new(5, 0).ord(Gaussian::new(1, 2)), 1);
        assert_eq!(Gaussian::new(-1, 2).ord(Gaussian::new(2, 1)), 1);
        assert_eq!(Gaussian::new(-1, 2).ord(Gaussian::new(1, 2)), 0);
    }

    #[test]
    fn projective_key_ignores_scalars() {
        let m = GMatrix([1, 2, 0, 0, 1, 0, 3, 0, 1].map(|x| Gaussian::new(x, 0)));
        let scaled = GMatrix(m.0.map(|x| x * Gaussian::new(-2, 4)));
        assert_eq!(m.projective_key(), scaled.projective_key());
        assert_eq!(m.det(), Gaussian::ONE);
    }
}
