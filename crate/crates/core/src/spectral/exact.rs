//! Exact integer matrices: products, modular ranks and fraction-free ranks.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Prime used for modular ranks.
pub const RANK_PRIME: u64 = 2_147_483_647;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    /// `self − c·I`
    pub fn minus_scalar(&self, c: i64) -> IntMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m.data[i * self.cols + i] -= c;
        }
        m
    }

    /// Exact product; errors if an entry leaves the `i64` range.
    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        assert_eq!(self.cols, other.rows);
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let rows: Vec<Option<Vec<i64>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![0i128; m];
                for t in 0..k {
                    let a = self.data[i * k + t] as i128;
                    if a == 0 {
                        continue;
                    }
                    let row = &other.data[t * m..(t + 1) * m];
                    for (s, &b) in acc.iter_mut().zip(row) {
                        *s += a * b as i128;
                    }
                }
                acc.into_iter().map(|x| i64::try_from(x).ok()).collect()
            })
            .collect();
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            data.extend(r.ok_or_else(|| Error::Invalid("integer matrix product overflows i64".into()))?);
        }
        Ok(IntMatrix { rows: n, cols: m, data })
    }

    /// The common entry, if all entries are equal.
    pub fn constant_value(&self) -> Option<i64> {
        let first = *self.data.first()?;
        self.data.iter().all(|&x| x == first).then_some(first)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Rank over `F_p`; a lower bound for the rank over `Q`.
    pub fn rank_mod(&self, p: u64) -> usize {
        let (n, m) = (self.rows, self.cols);
        let mut a: Vec<u64> = self.data.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        let mut rank = 0;
        for col in 0..m {
            let Some(piv) = (rank..n).find(|&i| a[i * m + col] != 0) else {
                continue;
            };
            if piv != rank {
                for j in 0..m {
                    a.swap(piv * m + j, rank * m + j);
                }
            }
            let inv = pow_mod(a[rank * m + col], p - 2, p);
            for j in col..m {
                a[rank * m + j] = a[rank * m + j] * inv % p;
            }
            let (head, tail) = a.split_at_mut((rank + 1) * m);
            let pivot_row = &head[rank * m..];
            tail.par_chunks_mut(m).for_each(|row| {
                let c = row[col];
                if c != 0 {
                    for j in col..m {
                        row[j] = (row[j] + (p - c) * pivot_row[j]) % p;
                    }
                }
            });
            rank += 1;
            if rank == n {
                break;
            }
        }
        rank
    }

    /// Rank over `Q` by fraction-free (Bareiss) elimination in big integers.
    pub fn rank_exact(&self) -> usize {
        let (n, m) = (self.rows, self.cols);
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..m).map(|j| BigInt::from(self.get(i, j))).collect())
            .collect();
        let mut prev = BigInt::from(1);
        let mut rank = 0;
        for col in 0..m {
            let Some(piv) = (rank..n).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(piv, rank);
            for i in rank + 1..n {
                for j in col + 1..m {
                    let v = (&a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[rank][col].abs();
            if a[rank][col].is_negative() {
                prev = -prev;
            }
            rank += 1;
            if rank == n {
                break;
            }
        }
        rank
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        let mut m = IntMatrix::zeros(3, 3);
        m.data = vec![1, 2, 3, 2, 4, 6, 1, 0, 1];
        assert_eq!(m.rank_exact(), 2);
        assert_eq!(m.rank_mod(RANK_PRIME), 2);
        // rank drops mod 2 only
        m.data = vec![2, 0, 0, 0, 1, 0, 0, 0, 1];
        assert_eq!(m.rank_exact(), 3);
        assert_eq!(m.rank_mod(2), 2);
    }

    #[test]
    fn product_overflow_reported() {
        let mut m = IntMatrix::identity(2);
        m.data[0] = i64::MAX;
        m.data[1] = i64::MAX;
        let mut o = IntMatrix::identity(2);
        o.data[2] = 1;
        assert!(m.mul(&o).is_err());
    }

    proptest! {
        #[test]
        fn modular_rank_bounds_exact_rank(data in proptest::collection::vec(-3i64..4, 25)) {
            let m = IntMatrix { rows: 5, cols: 5, data };
            let exact = m.rank_exact();
            prop_assert!(m.rank_mod(RANK_PRIME) <= exact);
            prop_assert!(m.rank_mod(3) <= exact);
            // Small entries cannot produce minors divisible by the large prime.
            prop_assert_eq!(m.rank_mod(RANK_PRIME), exact);
        }
    }
}
