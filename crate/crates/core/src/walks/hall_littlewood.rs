//! Exact evaluation of the Hall–Littlewood polynomial `P_{[m,0,0]}(x_1,x_2,x_3; t)`.
//!
//! The symmetrization `Σ_i x_i^m Π_{j≠i} (x_i − t·x_j)/(x_i − x_j)` is put over
//! the Vandermonde denominator and divided out exactly, leaving a polynomial
//! that can be evaluated anywhere, including at coinciding arguments.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

type Q = BigRational;

fn rat(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// A polynomial in three variables with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly3(BTreeMap<[u32; 3], Q>);

impl Poly3 {
    pub fn constant(c: Q) -> Self {
        let mut p = Self::default();
        p.add_term([0; 3], c);
        p
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        let mut p = Self::default();
        p.add_term(e, Q::one());
        p
    }

    fn add_term(&mut self, e: [u32; 3], c: Q) {
        let slot = self.0.entry(e).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Q::one()), |acc, _| &acc * self)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self(self.0.iter().map(|(e, x)| (*e, x * c)).filter(|(_, x)| !x.is_zero()).collect())
    }

    /// Exact quotient by `x_a − x_b`.
    pub fn div_difference(&self, a: usize, b: usize) -> Result<Self> {
        let mut rem = self.clone();
        let mut quot = Self::default();
        // Each step removes the term of highest x_a-degree and pushes its
        // x_a-degree down by one, so the loop terminates.
        while let Some((&e, c)) = rem.0.iter().max_by_key(|(e, _)| (e[a], **e)) {
            if e[a] == 0 {
                return Err(Error::Violation(format!("not divisible by x{} - x{}", a + 1, b + 1)));
            }
            let c = c.clone();
            let mut f = e;
            f[a] -= 1;
            quot.add_term(f, c.clone());
            rem.add_term(e, -c.clone());
            let mut g = f;
            g[b] += 1;
            rem.add_term(g, c);
        }
        Ok(quot)
    }

    pub fn eval<T>(&self, x: [&T; 3]) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T> + From<Q>,
    {
        let pw = |v: &T, k: u32| (0..k).fold(T::from(Q::one()), |acc, _| acc * v.clone());
        self.0.iter().fold(T::from(Q::zero()), |acc, (e, c)| {
            acc + T::from(c.clone()) * pw(x[0], e[0]) * pw(x[1], e[1]) * pw(x[2], e[2])
        })
    }
}

impl Add for &Poly3 {
    type Output = Poly3;
    fn add(self, o: &Poly3) -> Poly3 {
        let mut p = self.clone();
        for (e, c) in &o.0 {
            p.add_term(*e, c.clone());
        }
        p
    }
}

impl Sub for &Poly3 {
    type Output = Poly3;
    fn sub(self, o: &Poly3) -> Poly3 {
        self + &o.scale(&-Q::one())
    }
}

impl Mul for &Poly3 {
    type Output = Poly3;
    fn mul(self, o: &Poly3) -> Poly3 {
        let mut p = Poly3::default();
        for (e, c) in &self.0 {
            for (f, d) in &o.0 {
                p.add_term([e[0] + f[0], e[1] + f[1], e[2] + f[2]], c * d);
            }
        }
        p
    }
}

/// `P_{[m,0,0]}(x_1,x_2,x_3; t)` as an explicit polynomial.
pub fn hall_littlewood(m: u32, t: &Q) -> Result<Poly3> {
    let x = [Poly3::var(0), Poly3::var(1), Poly3::var(2)];
    let mut num = Poly3::default();
    for i in 0..3 {
        // V / Π_{j≠i}(x_i − x_j) = (−1)^i Π_{a<b; a,b≠i}(x_a − x_b).
        let mut term = x[i].pow(m);
        for j in (0..3).filter(|&j| j != i) {
            term = &term * &(&x[i] - &x[j].scale(t));
        }
        let rest: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        term = &term * &(&x[rest[0]] - &x[rest[1]]);
        if i == 1 {
            term = term.scale(&-Q::one());
        }
        num = &num + &term;
    }
    num.div_difference(0, 1)?.div_difference(0, 2)?.div_difference(1, 2)
}

/// `½[(m²+3m+2)q^m − 2(m²−1)q^{m−1} + (m²−3m+2)q^{m−2}]`.
pub fn closed_form(m: u32, q: u64) -> Q {
    let (m, q) = (m as i64, rat(q as i64));
    let qp = |k: i64| {
        if k >= 0 {
            num_traits::pow(q.clone(), k as usize)
        } else {
            num_traits::pow(q.recip(), (-k) as usize)
        }
    };
    (rat(m * m + 3 * m + 2) * qp(m) - rat(2 * (m * m - 1)) * qp(m - 1) + rat(m * m - 3 * m + 2) * qp(m - 2)) / rat(2)
}

/// Bound on the largest nontrivial eigenvalue of `A_m`:
/// `(m²+3m+2)q^m − 2(m²−1)q^{m−1} + (m²−3m+2)q^{m−2}`.
pub fn lambda_m_bound(q: u64, m: u32) -> f64 {
    let (q, m) = (q as f64, m as f64);
    (m * m + 3.0 * m + 2.0) * q.powf(m) - 2.0 * (m * m - 1.0) * q.powf(m - 1.0)
        + (m * m - 3.0 * m + 2.0) * q.powf(m - 2.0)
}

/// `(m²+3m+2)/q^m`, the normalized form of [`lambda_m_bound`].
pub fn lambda_m_normalized(q: u64, m: u32) -> f64 {
    let m_ = m as f64;
    (m_ * m_ + 3.0 * m_ + 2.0) / (q as f64).powi(m as i32)
}

/// Degree `2(q²+q+1)q^{2(m−1)}` of `A_m` (1 for `m = 0`).
pub fn am_degree(q: u64, m: u32) -> u64 {
    if m == 0 {
        1
    } else {
        2 * (q * q + q + 1) * q.pow(2 * (m - 1))
    }
}

/// An element `a + bω` of `Q(ω)`, `ω² + ω + 1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QOmega {
    pub a: Q,
    pub b: Q,
}

impl QOmega {
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }

    pub fn omega_pow(j: u32) -> Self {
        match j % 3 {
            0 => Self::new(Q::one(), Q::zero()),
            1 => Self::new(Q::zero(), Q::one()),
            _ => Self::new(-Q::one(), -Q::one()),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(&self.a * c, &self.b * c)
    }

    /// `a + bω` has conjugate `a + bω²` and norm `a² − ab + b²`.
    pub fn inv(&self) -> Option<Self> {
        let n = &self.a * &self.a - &self.a * &self.b + &self.b * &self.b;
        (!n.is_zero()).then(|| Self::new((&self.a - &self.b) / &n, -&self.b / &n))
    }
}

impl From<Q> for QOmega {
    fn from(a: Q) -> Self {
        Self::new(a, Q::zero())
    }
}

impl Add for QOmega {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for QOmega {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl Mul for QOmega {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // (a + bω)(c + dω) = ac − bd + (ad + bc − bd)ω
        let bd = &self.b * &o.b;
        Self::new(&self.a * &o.a - &bd, &self.a * &o.b + &self.b * &o.a - bd)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HallLittlewoodCheck {
    pub m: u32,
    pub q: u64,
    /// `q^m·P_{[m,0,0]}(1,1,1; 1/q)`
    pub at_ones: String,
    pub closed_form: String,
    pub closed_form_matches: bool,
    /// `q^m·P(ω^j/q, ω^j, ω^j q; 1/q) = ω^{jm}(q²+q+1)q^{2(m−1)}` for `j = 0, 1, 2`.
    pub omega_matches: [bool; 3],
}

impl HallLittlewoodCheck {
    pub fn passed(&self) -> bool {
        self.closed_form_matches && self.omega_matches.iter().all(|&b| b)
    }
}

pub fn check(m: u32, q: u64) -> Result<HallLittlewoodCheck> {
    if m == 0 || q < 2 {
        return Err(Error::Invalid(format!("need m ≥ 1 and q ≥ 2, got m = {m}, q = {q}")));
    }
    let qr = rat(q as i64);
    let p = hall_littlewood(m, &qr.recip())?;
    let qm = num_traits::pow(qr.clone(), m as usize);
    let one = Q::one();
    let at_ones = p.eval([&one, &one, &one]) * &qm;
    let closed = closed_form(m, q);
    let target = rat(((q * q + q + 1) * q.pow(2 * (m - 1))) as i64);
    let omega_matches = [0, 1, 2].map(|j| {
        let w = QOmega::omega_pow(j);
        let x = [w.scale(&qr.recip()), w.clone(), w.scale(&qr)];
        let value = p.eval([&x[0], &x[1], &x[2]]).scale(&qm);
        value == QOmega::omega_pow(j * m).scale(&target)
    });
    Ok(HallLittlewoodCheck {
        m,
        q,
        at_ones: at_ones.to_string(),
        closed_form: closed.to_string(),
        closed_form_matches: at_ones == closed,
        omega_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The unreduced symmetrization at pairwise distinct rational points.
    fn direct(m: u32, t: &Q, x: [Q; 3]) -> Q {
        (0..3)
            .map(|i| {
                (0..3).filter(|&j| j != i).fold(num_traits::pow(x[i].clone(), m as usize), |acc, j| {
                    acc * (&x[i] - t * &x[j]) / (&x[i] - &x[j])
                })
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    #[test]
    fn small_cases_are_elementary() {
        let t = rat(1) / rat(3);
        // P_{[1]} = x1 + x2 + x3.
        assert_eq!(hall_littlewood(1, &t).unwrap(), &(&Poly3::var(0) + &Poly3::var(1)) + &Poly3::var(2));
        assert_eq!(closed_form(1, 7), rat(21));
        assert_eq!(closed_form(2, 2), rat(18));
        assert_eq!(lambda_m_bound(13, 1), 78.0);
        assert_eq!(lambda_m_bound(13, 2), 1950.0);
    }

    #[test]
    fn limit_at_ones_matches_interpolation() {
        // P is a polynomial, so along (1, 1+e, 1+2e) it is a polynomial of
        // degree ≤ m in e; interpolate from e = 1..=m+1 and evaluate at 0.
        for m in 1..=5u32 {
            let t = rat(1) / rat(5);
            let pts: Vec<(Q, Q)> = (1..=m as i64 + 1)
                .map(|e| (rat(e), direct(m, &t, [rat(1), rat(1 + e), rat(1 + 2 * e)])))
                .collect();
            let at_zero = pts.iter().enumerate().fold(Q::zero(), |acc, (i, (xi, yi))| {
                let li = pts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(Q::one(), |l, (_, (xj, _))| l * (-xj.clone()) / (xi - xj));
                acc + yi * li
            });
            let p = hall_littlewood(m, &t).unwrap();
            let one = Q::one();
            assert_eq!(p.eval([&one, &one, &one]), at_zero, "m = {m}");
        }
    }

    #[test]
    fn polynomial_agrees_with_symmetrization() {
        let t = rat(2) / rat(7);
        let p = hall_littlewood(4, &t).unwrap();
        let x = [rat(3) / rat(2), rat(-2), rat(5)];
        assert_eq!(p.eval([&x[0], &x[1], &x[2]]), direct(4, &t, x));
    }

    #[test]
    fn omega_arithmetic() {
        let w = QOmega::omega_pow(1);
        assert_eq!(w.clone() * w.clone() * w.clone(), QOmega::omega_pow(0));
        let z = QOmega::new(rat(2), rat(-3));
        assert_eq!(z.clone() * z.inv().unwrap(), QOmega::omega_pow(0));
    }

    #[test]
    fn checks_pass_for_small_m() {
        for m in 1..=3 {
            assert!(check(m, 3).unwrap().passed());
        }
    }
}
